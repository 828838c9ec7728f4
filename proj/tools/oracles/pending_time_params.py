"""Moment-matching oracle for the truncated lognormal pending-time model.

Solves for (mu, sigma) such that
  * the mean of LogNormal(mu, sigma) truncated to [2, 146] s is 16.3 s
  * the untruncated 99.9th percentile sits at the 146 s upper bound.
The resulting constants are frozen in include/chainsim/ledger/pending_time.hpp.
"""
import numpy as np
from scipy import optimize, stats, integrate

LO, HI, MEAN, UPPER_Q = 2.0, 146.0, 16.3, 0.999


def truncated_mean(mu, sigma):
    dist = stats.lognorm(s=sigma, scale=np.exp(mu))
    mass = dist.cdf(HI) - dist.cdf(LO)
    num, _ = integrate.quad(lambda x: x * dist.pdf(x), LO, HI, limit=200)
    return num / mass


def equations(v):
    mu, sigma = v
    z = stats.norm.ppf(UPPER_Q)
    return [truncated_mean(mu, sigma) - MEAN, mu + sigma * z - np.log(HI)]


mu, sigma = optimize.fsolve(equations, [2.5, 0.7], xtol=1e-13)
print(f"mu={mu:.12f} sigma={sigma:.12f} truncated_mean={truncated_mean(mu, sigma):.10f}")
