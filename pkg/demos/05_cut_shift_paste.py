"""Cut-shift-and-paste closure of the recurrence families.

Partition the naturals, shift each piece, unite: the families that define
the recurrence hierarchy (bounded gaps, positive lower/upper/window density,
horizon-spanning infinitude) survive with controlled loss: gaps grow by at
most the largest shift, densities shrink by at most the piece count (with
the window estimate keeping at least half of that).
"""

import numpy as np

from recurlab import (CutShiftPaste, IndexWindow, SetPredicate,
                      cut_shift_paste, cut_shift_paste_check, density_report,
                      syndetic_certificate)

print("one concrete transform")
a = IndexWindow.residue(3, 0, 3000)
inst = CutShiftPaste(
    (SetPredicate.residue_class(2, 0), SetPredicate.residue_class(2, 1)),
    (7, 40))
out = cut_shift_paste(a, inst)
pre, post = syndetic_certificate(a), syndetic_certificate(out)
print(f"  multiples of 3, cut by parity, shifted by (7, 40)")
print(f"  gap {pre.max_gap} -> {post.largest_interior_gap} "
      f"(bound: gap + max shift = {pre.max_gap + inst.max_shift})")
pre_d, post_d = density_report(a), density_report(out)
print(f"  window density {pre_d.banach_upper_est:.4f} -> "
      f"{post_d.banach_upper_est:.4f} "
      f"(floor: pre/(2q) = {pre_d.banach_upper_est / 4:.4f})")

print("\nidentity instance is the identity")
ident = CutShiftPaste((SetPredicate.everything(),), (0,))
print(f"  output equals input: {cut_shift_paste(a, ident).elements == a.elements}")

print("\nrandomized closure margins, 300 trials per family")
for i, family in enumerate(("infinite", "syndetic", "lower-density",
                            "upper-density", "banach-density")):
    check = cut_shift_paste_check(family, trials=300, seed=100 + i)
    m = check.metrics
    margin = m["min_margin"]
    margin_text = f"{margin:.4f}" if isinstance(margin, float) else str(margin)
    print(f"  {family:<16} violations={m['violations']:<3} "
          f"worst margin={margin_text}")
