"""Weighted backward shifts: the series that decides recurrence.

For a weight sequence w the series sum over A of 1/(w_1 ... w_n) separates
the recurrent from the barren.  Doubling weights admit an exact geometric
fixed point; the harmonic-threshold weights (n+1)/n push the partial sums
past any bound, so no vector can return along a positive-density set.
"""

from fractions import Fraction

from recurlab import (IndexWindow, Rule, SequenceLp, SparseVector,
                      WeightedBackwardShift, apply, diff_seminorm,
                      shift_series_check)

L2 = SequenceLp(2)

print("doubling weights: geometric fixed point")
out = shift_series_check(Rule("2"), IndexWindow.from_iterable(range(1, 501), 500))
m = out.metrics
print(f"  verdict: {m['verdict']}, partial sum {m['partial_sum']:.9f}")
print(f"  truncated fixed point: residual {m['fixed_point_residual']:.3e} "
      f"<= certified tail {m['certified_tail']:.3e}")

b2 = WeightedBackwardShift(Rule("2"))
x = SparseVector.from_pairs(L2, [(n, Fraction(1, 2 ** n)) for n in range(1, 21)])
res = diff_seminorm(L2, 0, apply(b2, x), x)
print(f"  by hand: ||B x - x|| for the depth-20 truncation is exactly "
      f"2^-20 = {float(res):.3e}")

print("\nharmonic-threshold weights: divergence inside the horizon")
out = shift_series_check(Rule("(n+1)/n"),
                         IndexWindow.from_iterable(range(1, 100_001), 100_000),
                         10.0)
m = out.metrics
print(f"  verdict: {m['verdict']}, sum reaches {m['partial_sum']:.4f}, "
      f"crosses 10 near n = {m['crossing_n']}")
print("  curve:", ", ".join(f"({n}, {v:.2f})" for n, v in m["curve"][::8]))

print("\npartial sums are almost fixed points with exploding norms")
weights = Rule("(n+1)/n")
bh = WeightedBackwardShift(weights)
for depth in (10, 100, 1000):
    s = SparseVector.from_pairs(
        L2, [(n, Fraction(1, n + 1)) for n in range(1, depth + 1)])
    from recurlab import seminorm
    norm = float(seminorm(SequenceLp(1), 0, s))
    resid = float(diff_seminorm(L2, 0, apply(bh, s), s))
    print(f"  depth {depth:>4}: l1 mass {norm:8.4f} grows, "
          f"residual ||B s - s|| = {resid:.2e} vanishes")
