"""Density calculus on observed subsets of N0.

Three sets with three very different density profiles, measured with the
same toolkit: a periodic set, the squares, and a set of factorial-anchored
bursts whose window density is maximal even though its running density
vanishes.  Everything is an estimate over a finite window, with the
evidence (curves, gaps, censored boundary) reported next to the number.
"""

import math

from recurlab import (IndexWindow, density_report, ip_star_probe,
                      syndetic_certificate, translation_invariance_check)


def show(name, rep, cert=None):
    print(f"\n{name}")
    print(f"  lower ~ {rep.lower_est:.6f}   upper ~ {rep.upper_est:.6f}   "
          f"window-max ~ {rep.banach_upper_est:.6f}")
    if cert:
        print(f"  gaps: certified={cert.ok} max_gap={cert.max_gap} "
              f"tail_gap={cert.tail_gap} (tail censored, never counted)")
    head = ", ".join(f"({n}, {v:.4f})" for n, v in rep.running_density_curve[:4])
    print(f"  running-density curve head: {head} ...")


H = 100_000

evens = IndexWindow.residue(2, 0, H)
show("evens on [0, 10^5]", density_report(evens, burn_in=H // 2,
                                          schedule=(H // 4, H // 2)),
     syndetic_certificate(evens))

squares = IndexWindow.from_iterable((n * n for n in range(1000)), H)
show("squares on [0, 10^5]", density_report(squares, burn_in=H // 2,
                                            schedule=(H // 4, H // 2)),
     syndetic_certificate(squares))

H10 = math.factorial(10)
bursts = []
for j in range(1, 11):
    base = math.factorial(j)
    bursts.extend(range(base, min(base + j, H10) + 1))
burst_window = IndexWindow.from_iterable(bursts, H10)
rep = density_report(burst_window, schedule=(3, 9))
show("factorial bursts [j!, j!+j] on [0, 10!]", rep)
print("  the nine-long window over [9!, 9!+9] is full:",
      f"window-max at L=9 is {dict(rep.banach_curve)[9]}")

print("\ndual-family probes")
for name, window in [("multiples of 4", IndexWindow.residue(4, 0, 10_000)),
                     ("odd numbers", IndexWindow.residue(2, 1, 10_000))]:
    probe = ip_star_probe(window)
    detail = (f"k={probe.certificate_k}" if probe.is_arithmetic
              else f"witness generators {probe.witness[:5]}...")
    print(f"  {name}: {probe.verdict} ({detail})")

print("\ntranslation invariance of the window estimate")
out = translation_invariance_check(IndexWindow.residue(3, 0, 10_000), 7)
print(f"  3N0 shifted by 7: status={out.status} "
      f"window-max {out.metrics['banach_pre']:.6f} -> {out.metrics['banach_post']:.6f}")
