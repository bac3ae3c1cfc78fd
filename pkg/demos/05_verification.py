#! /usr/bin/env python3
# The verification harness: budget checks, KS tests of the marginals, and
# fixed deviations played against k - 1 equilibrium opponents.

from multiblotto import GameSpec, RngStream, SphereSampler, VerificationReport, check_budget_as, check_marginals
from multiblotto.verify import deviation_library, lotto_deviation_test

spec = GameSpec.continuous(3, [5, 4, 3, 2, 1])
sampler = SphereSampler(spec)
stream = RngStream(2024)

report = VerificationReport()
report.extend(check_budget_as(spec, sampler, 100_000, stream.fork(0)))
report.extend(check_marginals(spec, sampler, 100_000, stream.fork(1)))
lib = deviation_library(spec, stream.fork(2), n_random=3)
report.extend(lotto_deviation_test(spec, sampler, lib, 100_000, stream.fork(3)))
print(report.table())
