"""Closed-form values of the one-shot games as lambda goes to 0.

value_G keeps oscillating: its values at lambda = 2^(-2m-1) depend on
whether m is an even or odd multiple of r.
"""

from tauber.counterexample import (
    CounterexampleParams,
    distinct_limits_report,
    dyadic_grid,
    oscillation_scan,
)

params = CounterexampleParams(r=2, x=0.6)
grid = dyadic_grid(2.0**-40, j_min=2)

report = oscillation_scan(params, grid)
print("aligned points (m, lambda, argmax, value_G):")
for m, lam, best, val in sorted(report.even + report.odd):
    print(f"  m={m:2d}  lambda={lam:.3e}  argmax={best:2d}  value_G={val:.6f}")
print(f"liminf {report.liminf:.6f}, limsup {report.limsup:.6f}")

print()
for line in distinct_limits_report(params, grid).lines():
    print(line)
