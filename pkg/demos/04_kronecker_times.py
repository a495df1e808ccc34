"""Return times of simultaneous rotations, and what they buy.

The set {n : max_j |lambda_j^n - 1| < eps} for unimodular lambda_j is the
engine behind recurrence of diagonal operators, matrices with unimodular
spectrum, and sums of unimodular eigenvectors.  At desk scale we certify
bounded gaps, probe the dual-family structure, and feed the window through
the eigenvector-span budget.
"""

import math
from fractions import Fraction

from recurlab import (Diagonal, FiniteDim, Matrix, Rule, SequenceLp,
                      SparseVector, diagonal_criterion_check,
                      eigenvector_span_check, kronecker_return_check,
                      matrix_criterion_check)

print("return-set geometry for a few rotation tuples at N = 10^5")
rows = [
    ("fourth root of unity", [Fraction(1, 4)], 1.0),
    ("sqrt(2) rotation", [math.sqrt(2) % 1], 0.1),
    ("sqrt(2) + fifth root", [math.sqrt(2) % 1, Fraction(1, 5)], 0.5),
    ("three roots of unity", [Fraction(1, 3), Fraction(1, 4), Fraction(1, 8)], 0.3),
]
for name, turns, eps in rows:
    out = kronecker_return_check(turns, eps, 100_000)
    m = out.metrics
    extra = f" window = {m['exact_multiple']}N0 exactly" \
        if "exact_multiple" in m else ""
    print(f"  {name:<24} eps={eps:<4} gap={m['max_gap']:<6} "
          f"count={m['count']:<6} probe={m['probe']}{extra}")

print("\nmatrix criterion versus simulated basis orbits")
th = 2 * math.pi / 7
rot7 = Matrix.from_array([[math.cos(th), -math.sin(th)],
                          [math.sin(th), math.cos(th)]])
for name, mat in [("rotation by 2pi/7", rot7),
                  ("jordan block", Matrix.from_array([[1, 1], [0, 1]]))]:
    out = matrix_criterion_check(mat, [Fraction(1, 2), Fraction(1, 4)], 10_000)
    print(f"  {name}: criterion={out.metrics['criterion']} "
          f"labels={out.metrics['labels']} agreement={out.passed}")

print("\ndiagonal operators: all-unimodular entries decide everything")
for name, diag in [("rot(1/2^n)", Diagonal(turns=Rule("1/2^n"))),
                   ("values 2", Diagonal(values=Rule("2")))]:
    out = diagonal_criterion_check(diag, 5, [Fraction(1, 2), Fraction(1, 5)],
                                   10_000)
    print(f"  diag({name}): criterion={out.metrics['criterion']} "
          f"labels={out.metrics['labels']} agreement={out.passed}")

print("\nsums of unimodular eigenvectors recur on the budgeted window")
lam1 = complex(math.cos(th), math.sin(th))
v1 = SparseVector.from_pairs(FiniteDim(2), [(1, 1 + 0j), (2, -1j)])
v2 = SparseVector.from_pairs(FiniteDim(2), [(1, 1 + 0j), (2, 1j)])
out = eigenvector_span_check(rot7, [(lam1, v1), (lam1.conjugate(), v2)],
                             [0.5 + 0j, 0.5 + 0j],
                             [Fraction(1, 2), Fraction(1, 5)], 10_000)
print(f"  x = (v_1 + v_2)/2 under the 2pi/7 rotation: label "
      f"{out.metrics['label']}, rotation-window containment "
      f"{out.metrics['containment']}")
