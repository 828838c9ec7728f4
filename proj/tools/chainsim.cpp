#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "chainsim/connector/connector.hpp"
#include "chainsim/experiments/report.hpp"
#include "chainsim/experiments/runner.hpp"
#include "chainsim/ledger/snapshot.hpp"
#include "chainsim/service/http_service.hpp"

namespace fs = std::filesystem;
using namespace chainsim;
using nlohmann::json;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

// Input the user can fix: bad flags, config, or data files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(file.string() + ": " + e.what());
  }
}

// Writes whichever reports the set of scenario names supports.
void emit_all(const std::vector<experiments::ScenarioResults>& runs, const fs::path& out) {
  const experiments::ScenarioResults* no_is = nullptr;
  const experiments::ScenarioResults* b_is = nullptr;
  const experiments::ScenarioResults* distorted = nullptr;
  for (const auto& r : runs) {
    if (r.config.name == "no-is") no_is = &r;
    if (r.config.name == "b-is") b_is = &r;
    if (r.config.name == "b-is-distorted") distorted = &r;
  }
  for (const auto& r : runs) experiments::emit_scenario(r, out);
  if (no_is && b_is) experiments::emit_report(*no_is, *b_is, out);
  if (b_is && distorted) experiments::emit_distortion(*b_is, *distorted, out);
}

struct RunArgs {
  std::string config, scenario, out;
  bool trace = false, serial = false;
};

int cmd_run(const RunArgs& a) {
  using experiments::DistortionUse;
  const auto base = experiments::load_scenario(a.config);
  std::vector<experiments::ScenarioConfig> scenarios;
  switch (experiments::parse_scenario_kind(a.scenario)) {
    case experiments::ScenarioKind::NoIS:
      scenarios.push_back(experiments::make_scenario(base, sim::SharingMode::NoIS, DistortionUse::None));
      break;
    case experiments::ScenarioKind::BIS:
      scenarios.push_back(experiments::make_scenario(base, sim::SharingMode::BIS, DistortionUse::AsConfigured));
      break;
    case experiments::ScenarioKind::Both:
      scenarios.push_back(experiments::make_scenario(base, sim::SharingMode::NoIS, DistortionUse::None));
      scenarios.push_back(experiments::make_scenario(base, sim::SharingMode::BIS, DistortionUse::None));
      break;
    case experiments::ScenarioKind::Distorted:
      scenarios.push_back(experiments::make_scenario(base, sim::SharingMode::BIS, DistortionUse::None));
      scenarios.push_back(experiments::make_scenario(base, sim::SharingMode::BIS, DistortionUse::Applied));
      break;
  }
  fs::create_directories(a.out);
  experiments::RunOptions options;
  options.execution = a.serial ? experiments::Execution::Serial : experiments::Execution::Parallel;
  if (a.trace) options.trace_dir = fs::path(a.out);
  const auto runs = experiments::run_experiments(scenarios, options);

  std::ofstream results(fs::path(a.out) / "results.json");
  results << experiments::results_to_json(runs).dump(2) << '\n';
  emit_all(runs, a.out);
  for (const auto& r : runs) {
    std::cout << r.config.name << ": " << r.config.replications << " replications of " << r.config.sim.days
              << " days\n";
  }
  std::cout << "reports written to " << a.out << '\n';
  return 0;
}

int cmd_report(const std::string& results, const std::string& out) {
  const auto runs = experiments::results_from_json(read_json(results));
  fs::create_directories(out);
  emit_all(runs, out);
  std::cout << "reports written to " << out << '\n';
  return 0;
}

int cmd_serve(const std::string& state, const std::string& host, int port, std::size_t init) {
  fs::create_directories(state);
  const fs::path companies = fs::path(state) / "companies.json";
  if (!fs::exists(companies)) {
    if (init == 0) throw UsageError(companies.string() + " not found (use --init N to create N companies)");
    service::save_accounts(service::generate_accounts(init), companies);
    std::cout << "created " << init << " companies in " << companies.string() << '\n';
  }
  service::SharedInfoService svc(state);
  httplib::Server server;
  svc.install(server);
  // No SO_REUSEPORT: a second server on a busy port must fail to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (!server.bind_to_port(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << '\n';
    return kRuntimeError;
  }

  // Signals go to a waiting thread so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::atomic<bool> signalled = false;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });

  std::cout << "serving " << svc.accounts().size() << " companies on " << host << ":" << port << std::endl;
  server.listen_after_bind();
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cout << "stopped; chain has " << svc.connector().ledger().blocks().size() << " blocks\n";
  return 0;
}

int cmd_ledger_verify(const std::string& file) {
  std::vector<ledger::Block> blocks;
  try {
    blocks = ledger::load_snapshot(file);
  } catch (const json::exception& e) {
    throw UsageError(file + ": " + e.what());
  }
  if (auto err = ledger::verify_chain(std::span<const ledger::Block>(blocks))) {
    std::cout << "invalid: block " << err->index << ": " << err->reason << '\n';
    return kRuntimeError;
  }
  try {
    ledger::Ledger::from_blocks(blocks);
  } catch (const ledger::LedgerError& e) {
    std::cout << "invalid: " << e.what() << '\n';
    return kRuntimeError;
  }
  std::cout << "ok: " << blocks.size() << " blocks, head " << ledger::to_hex(blocks.back().block_hash) << '\n';
  return 0;
}

int cmd_record_verify(const std::string& chain, const std::string& record_file) {
  connector::SharedInfo record;
  try {
    record = connector::shared_info_from_json(read_json(record_file));
  } catch (const json::exception& e) {
    throw UsageError(record_file + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(record_file + ": " + e.what());
  }
  connector::Connector conn(ledger::Ledger::from_blocks(ledger::load_snapshot(chain)), {}, {});
  const auto status = conn.verify_shared_info(record);
  std::cout << connector::to_string(status) << '\n';
  return status == connector::VerifyStatus::Authentic ? 0 : kRuntimeError;
}

std::vector<double> read_sample(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open " + file);
  std::vector<double> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || line.find_first_not_of(" \t\r", used) != std::string::npos || !std::isfinite(v)) {
      throw UsageError(file + ":" + std::to_string(n) + ": not a number: " + line);
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(file + ": no values");
  return out;
}

int cmd_mwu(const std::string& file_a, const std::string& file_b, const std::string& alternative) {
  const auto a = read_sample(file_a);
  const auto b = read_sample(file_b);
  auto r = experiments::mann_whitney(a, b);
  if (alternative == "less") r.p = experiments::mann_whitney(b, a).p;
  std::printf("n_a %zu\nn_b %zu\n", r.n1, r.n2);
  std::printf("median_a %.4f\nmedian_b %.4f\nmedian_difference %.4f\n", r.median_a, r.median_b,
              r.median_difference);
  std::printf("W %.3f\nU %.3f\np %.6f\n", r.w, r.u, r.p);
  std::printf("alternative %s\nmethod %s\n", alternative.c_str(), r.exact ? "exact" : "normal");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply-chain information sharing simulator and certification service"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write reports");
  run_cmd->add_option("--config", run.config, "Scenario JSON")->required();
  run_cmd->add_option("--scenario", run.scenario, "no-is, b-is, both or distorted")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_flag("--trace", run.trace, "Write one event trace per replication");
  run_cmd->add_flag("--serial", run.serial, "Run replications one after another");

  std::string results, report_out;
  auto* report_cmd = app.add_subcommand("report", "Regenerate reports from results.json");
  report_cmd->add_option("--results", results, "results.json from a previous run")->required();
  report_cmd->add_option("--out", report_out, "Output directory")->required();

  std::string state, host = "127.0.0.1";
  int port = 8080;
  std::size_t init = 0;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the certification HTTP interface");
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--state", state, "State directory")->required();
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--init", init, "Create this many companies when the state is new");

  std::string chain_file;
  auto* lv_cmd = app.add_subcommand("ledger-verify", "Check a chain snapshot");
  lv_cmd->add_option("chain", chain_file, "Chain snapshot JSON")->required();

  std::string record_chain, record_file;
  auto* rv_cmd = app.add_subcommand("record-verify", "Check a shared-info record against a chain");
  rv_cmd->add_option("--chain", record_chain, "Chain snapshot JSON")->required();
  rv_cmd->add_option("record", record_file, "SharedInfo JSON")->required();

  std::string file_a, file_b, alternative = "greater";
  auto* mwu_cmd = app.add_subcommand("mwu", "One-sided Mann-Whitney test on two samples");
  mwu_cmd->add_option("file_a", file_a, "First sample, one number per line")->required();
  mwu_cmd->add_option("file_b", file_b, "Second sample, one number per line")->required();
  mwu_cmd->add_option("--alternative", alternative, "greater or less")
      ->check(CLI::IsMember({"greater", "less"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*report_cmd) return cmd_report(results, report_out);
    if (*serve_cmd) return cmd_serve(state, host, port, init);
    if (*lv_cmd) return cmd_ledger_verify(chain_file);
    if (*rv_cmd) return cmd_record_verify(record_chain, record_file);
    if (*mwu_cmd) return cmd_mwu(file_a, file_b, alternative);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const experiments::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
