#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "chainsim/ledger/gas.hpp"
#include "chainsim/ledger/ledger.hpp"
#include "chainsim/ledger/pending_time.hpp"
#include "chainsim/ledger/snapshot.hpp"
#include "fixtures.hpp"

using namespace chainsim;
using namespace chainsim::ledger;
using chainsim::testing::id_of;
using chainsim::testing::key;
using chainsim::testing::post_call;

namespace {

// Deployer plus `extra` members authorized through the voting flow.
Ledger ledger_with_members(std::size_t extra) {
  const KeyPair deployer = key(0);
  Ledger l = Ledger::genesis(deployer);
  std::vector<KeyPair> members{deployer};
  double t = 1;
  for (std::size_t i = 1; i <= extra; ++i) {
    const KeyPair cand = key(static_cast<std::uint8_t>(i));
    l.submit(make_transaction(cand, 0, RequestAuthorization{}, 0, 0.0));
    l.mine_block(t++);
    for (const auto& m : members) {
      if (l.contract().is_authorized(id_of(cand))) break;
      l.submit(make_transaction(m, l.next_nonce(id_of(m)), Vote{id_of(cand), true}, 0, 0.0));
      l.mine_block(t++);
    }
    members.push_back(cand);
  }
  return l;
}

}  // namespace

TEST_CASE("crypto primitives") {
  CHECK(to_hex(sha512("abc")).substr(0, 16) == "ddaf35a193617aba");
  CHECK(from_hex("00ff7A") == Bytes{0x00, 0xff, 0x7a});
  CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(digest_from_hex("00"), std::invalid_argument);

  const KeyPair k = key(1);
  const std::string msg = "payload";
  const Bytes m(msg.begin(), msg.end());
  Bytes sig = k.sign(m);
  CHECK(sig == k.sign(m));
  CHECK(verify_signature(k.public_key(), m, sig));
  sig[5] ^= 1;
  CHECK_FALSE(verify_signature(k.public_key(), m, sig));
  CHECK_FALSE(verify_signature(Bytes{1, 2, 3}, m, sig));
  CHECK(KeyPair::from_seed(k.seed()).public_key() == k.public_key());
}

TEST_CASE("address id is the hex of the first 20 bytes of sha512(pk)") {
  const KeyPair k = key(2);
  const Address a = Address::from_public_key(k.public_key());
  CHECK(a.id.size() == 40);
  CHECK(a.id == to_hex(sha512(k.public_key())).substr(0, 40));
  CHECK(a == Address::from_public_key(k.public_key()));
}

TEST_CASE("submit_transaction") {
  Ledger l = Ledger::genesis(key(0));
  const KeyPair fresh = key(9);

  SUBCASE("fresh address request accepted") {
    l.submit(make_transaction(fresh, 0, RequestAuthorization{}, 0, 0.0));
    CHECK(l.pending_count() == 1);
  }
  SUBCASE("nonce reuse rejected") {
    l.submit(make_transaction(fresh, 0, RequestAuthorization{}, 0, 0.0));
    try {
      l.submit(make_transaction(fresh, 0, RequestAuthorization{}, 0, 1.0));
      FAIL("expected BadNonce");
    } catch (const LedgerError& e) {
      CHECK(e.code() == LedgerErrc::BadNonce);
    }
  }
  SUBCASE("post from unauthorized address") {
    try {
      l.submit(make_transaction(fresh, 0, post_call("x"), kPostSharedInfoGas, 1e-9));
      FAIL("expected Unauthorized");
    } catch (const LedgerError& e) {
      CHECK(e.code() == LedgerErrc::Unauthorized);
    }
    CHECK(l.pending_count() == 0);
  }
  SUBCASE("tampered signature") {
    auto tx = make_transaction(fresh, 0, RequestAuthorization{}, 0, 0.0);
    tx.nonce = 1;
    CHECK_THROWS_AS(l.submit(tx), LedgerError);
    try {
      l.submit(tx);
    } catch (const LedgerError& e) {
      CHECK(e.code() == LedgerErrc::BadSignature);
    }
  }
  SUBCASE("post gas must be 190000") {
    try {
      l.submit(make_transaction(key(0), 1, post_call("x"), 21000, 1e-9));
      FAIL("expected InvalidTransaction");
    } catch (const LedgerError& e) {
      CHECK(e.code() == LedgerErrc::InvalidTransaction);
    }
  }
}

TEST_CASE("mine_block") {
  Ledger l = ledger_with_members(2);
  const KeyPair a = key(1), b = key(2);

  SUBCASE("highest fee wins when only one fits") {
    l.submit(make_transaction(a, l.next_nonce(id_of(a)), post_call("A"), kPostSharedInfoGas, 2.0));
    l.submit(make_transaction(b, l.next_nonce(id_of(b)), post_call("B"), kPostSharedInfoGas, 5.0));
    const Block& blk = l.mine_block(100, 1);
    REQUIRE(blk.transactions.size() == 1);
    CHECK(blk.transactions[0].sender.id == id_of(b));
    CHECK(l.pending_count() == 1);
  }
  SUBCASE("successor links to predecessor") {
    Ledger g = Ledger::genesis(key(0));
    g.submit(make_transaction(key(3), 0, RequestAuthorization{}, 0, 0.0));
    const Block& blk = g.mine_block(1);
    CHECK(blk.index == 1);
    CHECK(blk.prev_hash == g.blocks()[0].block_hash);
    CHECK(g.blocks()[0].prev_hash == Digest{});
  }
  SUBCASE("two posts in one block get ids 0 then 1 in block order") {
    l.submit(make_transaction(a, l.next_nonce(id_of(a)), post_call("A"), kPostSharedInfoGas, 1.0));
    l.submit(make_transaction(b, l.next_nonce(id_of(b)), post_call("B"), kPostSharedInfoGas, 1.0));
    const Block& blk = l.mine_block(100);
    REQUIRE(blk.transactions.size() == 2);
    const auto* r0 = l.contract().record(0);
    const auto* r1 = l.contract().record(1);
    REQUIRE(r0);
    REQUIRE(r1);
    CHECK(r0->owner == blk.transactions[0].sender.id);
    CHECK(r1->owner == blk.transactions[1].sender.id);
    CHECK(r0->hash_sum == sha512("A"));
  }
  SUBCASE("empty pool") {
    try {
      l.mine_block(1);
      FAIL("expected EmptyPool");
    } catch (const LedgerError& e) {
      CHECK(e.code() == LedgerErrc::EmptyPool);
    }
  }
  SUBCASE("one sender's transactions keep nonce order despite fees") {
    const std::uint64_t n = l.next_nonce(id_of(a));
    l.submit(make_transaction(a, n, post_call("low"), kPostSharedInfoGas, 1.0));
    l.submit(make_transaction(a, n + 1, post_call("high"), kPostSharedInfoGas, 9.0));
    const Block& blk = l.mine_block(100);
    REQUIRE(blk.transactions.size() == 2);
    CHECK(blk.transactions[0].nonce == n);
    CHECK(blk.transactions[1].nonce == n + 1);
  }
}

TEST_CASE("fee ordering property: block fees are the max-fee prefix of the pool") {
  RngStream rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Ledger l = Ledger::genesis(key(0));
    std::vector<double> fees;
    const int pool = 2 + static_cast<int>(rng.next_u64() % 10);
    for (int i = 0; i < pool; ++i) {
      const double price = std::floor(rng.uniform(0, 6));
      fees.push_back(price * 1000);
      l.submit(make_transaction(key(static_cast<std::uint8_t>(10 + i)), 0, RequestAuthorization{}, 1000, price));
    }
    const std::size_t take = 1 + rng.next_u64() % static_cast<std::uint64_t>(pool);
    const Block& blk = l.mine_block(1, take);
    std::vector<double> got;
    for (const auto& tx : blk.transactions) got.push_back(static_cast<double>(tx.gas_amount) * tx.gas_price);
    std::sort(fees.rbegin(), fees.rend());
    fees.resize(take);
    std::sort(got.rbegin(), got.rend());
    CHECK(got == fees);
  }
}

TEST_CASE("apply_vote examples") {
  ContractState s;
  for (const char* a : {"a", "b", "c"}) s.bootstrap_authorized(a);
  s.request_authorization("x");
  CHECK(s.apply_vote("a", "x", true) == AuthorizationStatus::Pending);
  CHECK(s.apply_vote("b", "x", true) == AuthorizationStatus::Authorized);
  CHECK(s.is_authorized("x"));

  ContractState four;
  for (const char* a : {"a", "b", "c", "d"}) four.bootstrap_authorized(a);
  four.request_authorization("x");
  CHECK(four.apply_vote("a", "x", true) == AuthorizationStatus::Pending);
  CHECK(four.apply_vote("b", "x", true) == AuthorizationStatus::Pending);
  CHECK(four.apply_vote("c", "x", false) == AuthorizationStatus::Pending);
  CHECK(four.apply_vote("d", "x", false) == AuthorizationStatus::Pending);

  ContractState errs;
  errs.bootstrap_authorized("a");
  errs.bootstrap_authorized("b");
  errs.bootstrap_authorized("c");
  errs.request_authorization("x");
  errs.apply_vote("a", "x", true);
  CHECK_THROWS_WITH_AS(errs.apply_vote("a", "x", false), doctest::Contains("already"), LedgerError);
  CHECK_THROWS_AS(errs.apply_vote("zz", "x", true), LedgerError);
  CHECK_THROWS_AS(errs.apply_vote("a", "nobody", true), LedgerError);
}

TEST_CASE("denied candidate may re-apply") {
  ContractState s;
  s.bootstrap_authorized("a");
  s.request_authorization("x");
  CHECK(s.apply_vote("a", "x", false) == AuthorizationStatus::Denied);
  CHECK_FALSE(s.pending_auth().contains("x"));
  s.request_authorization("x");
  CHECK(s.pending_auth().at("x").votes_against.empty());
}

TEST_CASE("vote threshold property over every vote sequence for n = 1..16") {
  for (std::size_t n = 1; n <= 16; ++n) {
    const std::size_t quorum = n / 2 + 1;
    CHECK(majority_threshold(n) == quorum);
    // Voters cast in index order; bit i of the mask is voter i's approval.
    const std::uint32_t masks = n <= 12 ? (1u << n) : 4096u;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      const std::uint32_t m = n <= 12 ? mask : mask * 2654435761u;
      ContractState s;
      for (std::size_t i = 0; i < n; ++i) s.bootstrap_authorized("v" + std::to_string(i));
      s.request_authorization("x");
      std::size_t yes = 0, no = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool approve = (m >> i) & 1u;
        (approve ? yes : no)++;
        const auto status = s.apply_vote("v" + std::to_string(i), "x", approve);
        const auto expected = yes >= quorum  ? AuthorizationStatus::Authorized
                              : no >= quorum ? AuthorizationStatus::Denied
                                             : AuthorizationStatus::Pending;
        REQUIRE(status == expected);
        if (status != AuthorizationStatus::Pending) break;
      }
    }
  }
}

TEST_CASE("authorization safety: outsiders never mutate registry or pending set") {
  Ledger l = Ledger::genesis(key(0));
  l.submit(make_transaction(key(5), 0, RequestAuthorization{}, 0, 0.0));
  l.mine_block(1);
  const auto pending_before = l.contract().pending_auth().size();
  const KeyPair outsider = key(6);
  CHECK_THROWS_AS(l.submit(make_transaction(outsider, 0, Vote{id_of(key(5)), true}, 0, 0.0)), LedgerError);
  CHECK_THROWS_AS(l.submit(make_transaction(outsider, 0, post_call("x"), kPostSharedInfoGas, 0.0)),
                  LedgerError);
  CHECK(l.contract().pending_auth().size() == pending_before);
  CHECK(l.contract().registry().empty());
}

TEST_CASE("transaction_cost") {
  CHECK(transaction_cost(1, 1) == 1);
  CHECK(transaction_cost(190000, 5e-9) == doctest::Approx(9.5e-4).epsilon(1e-12));
  for (double a : {0.0, 0.5, 2.0, 7.0}) {
    CHECK(transaction_cost(a * 190000, 3e-9) == doctest::Approx(a * transaction_cost(190000, 3e-9)));
  }
  GasPricing pricing;
  CHECK(pricing.per_tx_eur(GasTier::Avg) == doctest::Approx(0.93));
  CHECK(transaction_cost(kPostSharedInfoGas, pricing.gas_price(GasTier::Avg)) * pricing.ether_eur ==
        doctest::Approx(0.93));
  CHECK(pricing.gas_price(GasTier::Avg) == doctest::Approx(5e-9));
  CHECK(transaction_cost(kPostSharedInfoGas, pricing.gas_price(GasTier::Max)) * pricing.ether_eur ==
        doctest::Approx(19.40));
  CHECK(parse_gas_tier("max") == GasTier::Max);
  CHECK_THROWS(parse_gas_tier("median"));
}

TEST_CASE("pending time sampler") {
  PendingTimeModel model;
  RngStream rng(derive_seed(1, {static_cast<std::uint64_t>(StreamPurpose::PendingTime)}));
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double d = model.sample(rng);
    REQUIRE(d >= 2.0);
    REQUIRE(d <= 146.0);
    sum += d;
  }
  CHECK(sum / n == doctest::Approx(16.3).epsilon(0.5 / 16.3));

  PendingTimeModel flat;
  flat.lo = flat.hi = 16.3;
  CHECK(flat.sample(rng) == 16.3);
}

TEST_CASE("verify_chain") {
  Ledger l = ledger_with_members(3);
  for (int i = 0; l.blocks().size() < 10; ++i) {
    const KeyPair k = key(static_cast<std::uint8_t>(1 + i % 3));
    l.submit(make_transaction(k, l.next_nonce(id_of(k)), post_call(std::to_string(i)), kPostSharedInfoGas, 1e-9));
    l.mine_block(1000 + i);
  }
  CHECK_FALSE(l.verify_chain().has_value());

  std::vector<Block> blocks(l.blocks().begin(), l.blocks().end());
  SUBCASE("flip a byte in block 3") {
    blocks[3].transactions[0].signature[0] ^= 0x01;
    auto err = verify_chain(blocks);
    REQUIRE(err);
    CHECK(err->index == 3);
  }
  SUBCASE("re-mined block 3 leaves block 4 stale") {
    blocks[3].timestamp += 1;
    blocks[3].block_hash = compute_block_hash(blocks[3]);
    auto err = verify_chain(blocks);
    REQUIRE(err);
    CHECK(err->index == 4);
  }
  SUBCASE("non-zero genesis prev_hash") {
    blocks[0].prev_hash[0] = 1;
    blocks[0].block_hash = compute_block_hash(blocks[0]);
    auto err = verify_chain(blocks);
    REQUIRE(err);
    CHECK(err->index == 0);
  }
}

TEST_CASE("append-only: earlier blocks are byte-identical after mining") {
  Ledger l = ledger_with_members(1);
  std::vector<Bytes> before;
  for (const auto& b : l.blocks()) before.push_back(serialize_header_and_body(b));
  l.submit(make_transaction(key(1), l.next_nonce(id_of(key(1))), post_call("z"), kPostSharedInfoGas, 1e-9));
  l.mine_block(99);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(serialize_header_and_body(l.blocks()[i]) == before[i]);
}

TEST_CASE("read_events") {
  ContractState empty;
  CHECK(empty.read_events(0).empty());

  Ledger l = Ledger::genesis(key(0));
  const auto base = l.read_events(0).size();
  CHECK(base == 0);
  l.submit(make_transaction(key(0), 1, post_call("p"), kPostSharedInfoGas, 1e-9));
  l.mine_block(5);
  const auto events = l.read_events(0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == EventKind::InfoPosted);
  CHECK(events[0].info_id == 0);
  CHECK(l.read_events(0) == events);
  CHECK(l.read_events(1).empty());
}

TEST_CASE("registry records are immutable across later blocks") {
  Ledger l = ledger_with_members(1);
  l.submit(make_transaction(key(1), l.next_nonce(id_of(key(1))), post_call("first", {id_of(key(0))}),
                            kPostSharedInfoGas, 1e-9));
  l.mine_block(10);
  const OnChainRecord snapshot = *l.contract().record(0);
  for (int i = 0; i < 5; ++i) {
    l.submit(make_transaction(key(0), l.next_nonce(id_of(key(0))), post_call(std::to_string(i)),
                              kPostSharedInfoGas, 1e-9));
    l.mine_block(11 + i);
  }
  const OnChainRecord& now = *l.contract().record(0);
  CHECK(now.owner == snapshot.owner);
  CHECK(now.hash_sum == snapshot.hash_sum);
  CHECK(now.visibility == snapshot.visibility);
  CHECK(now.block_index == snapshot.block_index);
  CHECK(now.tx_hash == snapshot.tx_hash);
}

TEST_CASE("snapshot round trip replays to the same state") {
  Ledger l = ledger_with_members(2);
  l.submit(make_transaction(key(2), l.next_nonce(id_of(key(2))), post_call("snap", {id_of(key(1))}),
                            kPostSharedInfoGas, 1e-9));
  l.mine_block(50.25);
  const auto path = std::filesystem::temp_directory_path() / "chainsim_snapshot_test.json";
  save_snapshot(l, path);
  Ledger back = Ledger::from_blocks(load_snapshot(path));
  std::filesystem::remove(path);
  REQUIRE(back.blocks().size() == l.blocks().size());
  CHECK(back.head().block_hash == l.head().block_hash);
  CHECK(back.contract().authorized() == l.contract().authorized());
  CHECK(back.read_events(0) == l.read_events(0));
  CHECK(back.next_nonce(id_of(key(2))) == l.next_nonce(id_of(key(2))));
  CHECK(back.deployer() == l.deployer());

  auto j = blocks_to_json(l.blocks());
  CHECK(j[1]["prev_hash"].get<std::string>() == to_hex(l.blocks()[0].block_hash));
  j[2]["txs"][0]["nonce"] = 7;
  CHECK_THROWS_AS(Ledger::from_blocks(blocks_from_json(j)), LedgerError);
}
