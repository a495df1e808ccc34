"""Finite-horizon combinatorics of subsets of N0.

Everything operates on an :class:`IndexWindow`: the elements of a set
``A`` of naturals actually observed on ``[0, H]``.  All density and gap
statements are estimates over that window, with the evidence (running
curves, observed gaps, probe budgets) recorded next to the number.  Limit
claims are deliberately out of reach; the classifier layer owns thresholds.

Implemented calculus:

* lower / upper running density and the sliding-window (Banach-type)
  density over a schedule of window lengths;
* bounded-gap certificates with censored boundary handling;
* finite-sums sets (all sums of distinct generators) and a three-valued
  probe for membership in the dual family of sets meeting every
  finite-sums set;
* the cut-shift-and-paste transform ``A -> union_j (n_j + A & I_j)`` for
  partitions into residue classes and interval unions;
* dilation ``A -> pA`` and contraction ``A -> {n : pn in A}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "IndexWindow",
    "DensityReport",
    "SyndeticCertificate",
    "SetPredicate",
    "CutShiftPaste",
    "IpProbeResult",
    "default_banach_schedule",
    "density_report",
    "syndetic_certificate",
    "ip_generate",
    "ip_star_probe",
    "arithmetic_certificate",
    "witness_floor",
    "cut_shift_paste",
    "dilate",
    "contract",
]


class ConfigurationError(ValueError):
    """Raised when an operation is invoked with inconsistent parameters."""


@dataclass(frozen=True)
class IndexWindow:
    """A finite observed subset of N0 together with its observation horizon.

    ``elements`` is strictly increasing and contained in ``[0, horizon]``.
    Membership of any ``n <= horizon`` is decided; nothing is known beyond.
    """

    elements: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        prev = -1
        for e in self.elements:
            if e <= prev:
                raise ValueError("elements must be strictly increasing")
            prev = e
        if self.elements and (self.elements[0] < 0 or self.elements[-1] > self.horizon):
            raise ValueError("elements must lie in [0, horizon]")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_iterable(it: Iterable[int], horizon: int) -> "IndexWindow":
        elems = sorted({int(n) for n in it if 0 <= int(n) <= horizon})
        return IndexWindow(tuple(elems), horizon)

    @staticmethod
    def residue(modulus: int, residue: int, horizon: int) -> "IndexWindow":
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        r = residue % modulus
        return IndexWindow(tuple(range(r, horizon + 1, modulus)), horizon)

    @staticmethod
    def full(horizon: int) -> "IndexWindow":
        return IndexWindow(tuple(range(horizon + 1)), horizon)

    # -- views -------------------------------------------------------------

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.elements)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.horizon + 1, dtype=bool)
        if self.elements:
            m[np.fromiter(self.elements, dtype=np.int64)] = True
        return m

    @property
    def count(self) -> int:
        return len(self.elements)

    def __contains__(self, n: int) -> bool:
        return n in self.member_set

    def translate(self, m: int) -> "IndexWindow":
        """Shift every element by ``m >= 0``; horizon grows with it."""
        if m < 0:
            raise ValueError("translation must be >= 0")
        return IndexWindow(tuple(e + m for e in self.elements), self.horizon + m)

    # -- serialization (header line then one decimal per line) -------------

    def to_text(self) -> str:
        lines = [f"horizon={self.horizon}"]
        lines.extend(str(e) for e in self.elements)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "IndexWindow":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("horizon="):
            raise ValueError("missing horizon= header")
        horizon = int(lines[0].split("=", 1)[1])
        return IndexWindow(tuple(int(ln) for ln in lines[1:]), horizon)


@dataclass(frozen=True)
class SyndeticCertificate:
    """Finite-horizon bounded-gaps evidence.

    Gaps are the differences of consecutive elements plus the gap from the
    left boundary 0 to the first element.  The trailing gap up to the horizon
    is a censored observation: it is reported (``tail_gap``) but never counted
    against the certificate, so a set cannot fail syndeticity merely by the
    window ending.  The certificate succeeds when the largest interior gap is
    at most ``gap_cap`` (a gap is only credibly bounded if the horizon is
    several times longer than it).
    """

    ok: bool
    max_gap: Optional[int]          # certified bound, None on failure
    largest_interior_gap: Optional[int]
    tail_gap: int
    gap_cap: int

    @property
    def largest_observed_gap(self) -> int:
        g = self.largest_interior_gap or 0
        return max(g, self.tail_gap)


def syndetic_certificate(window: IndexWindow,
                         gap_cap: Optional[int] = None) -> SyndeticCertificate:
    """Certify bounded gaps on the observed window.

    ``gap_cap`` defaults to ``horizon // 10``: at least ~10 recurrences of the
    largest gap must fit inside the horizon for the bound to count as
    evidence rather than accident.
    """
    if window.count == 0:
        raise ConfigurationError("no certificate for an empty window")
    h = window.horizon
    cap = gap_cap if gap_cap is not None else max(1, h // 10)
    elems = window.elements
    gaps = [elems[0] - 0] if elems[0] > 0 else []
    gaps.extend(elems[i + 1] - elems[i] for i in range(len(elems) - 1))
    tail = h - elems[-1]
    if not gaps:
        return SyndeticCertificate(False, None, None, tail, cap)
    interior = max(gaps)
    ok = interior <= cap
    return SyndeticCertificate(ok, interior if ok else None, interior, tail, cap)


def default_banach_schedule(horizon: int) -> tuple[int, ...]:
    """Window lengths H^(1/2), H^(2/3), H^(3/4); the largest is authoritative."""
    ls = sorted({max(1, int(horizon ** e)) for e in (0.5, 2.0 / 3.0, 0.75)})
    return tuple(l for l in ls if l <= horizon) or (max(1, horizon),)


@dataclass(frozen=True)
class DensityReport:
    """Lower/upper/Banach-type density estimates with their evidence.

    ``lower_est`` / ``upper_est`` are the min/max of the running density
    ``card(A & [0,N]) / (N+1)`` over ``N in [burn_in, H]``.  ``banach_upper_est``
    is the best sliding-window density at the largest schedule length,
    floored at ``upper_est`` so the chain

        ``lower_est <= upper_est <= banach_upper_est``

    holds for every report (a prefix [0, N] is itself a window of length
    N+1, so the prefix estimate is itself Banach-type evidence; the floor
    only repairs finite-scale inversions for front-loaded sets).
    Counting is exact; only the final ratios are floating.
    """

    lower_est: float
    upper_est: float
    banach_upper_est: float
    max_gap: Optional[int]
    burn_in: int
    schedule: tuple[int, ...]
    horizon: int
    running_density_curve: tuple[tuple[int, float], ...]
    banach_curve: tuple[tuple[int, float], ...]
    banach_raw: float = field(default=float("nan"))

    def __post_init__(self):
        if not (self.lower_est <= self.upper_est <= self.banach_upper_est + 1e-15):
            raise ValueError("density chain violated")


def _curve_samples(burn_in: int, horizon: int, points: int = 64) -> list[int]:
    if horizon <= burn_in:
        return [horizon]
    ns = {burn_in, horizon}
    span = horizon - burn_in
    for i in range(1, points):
        ns.add(burn_in + int(span * (i / points) ** 2))
    return sorted(ns)


def density_report(window: IndexWindow, burn_in: Optional[int] = None,
                   schedule: Optional[Sequence[int]] = None) -> DensityReport:
    """One-pass density estimation over the observed window.

    Running densities come from a cumulative count; each window length in the
    schedule is swept by a sliding window in a single pass.
    """
    h = window.horizon
    if h == 0:
        raise ConfigurationError("degenerate window: horizon must be >= 1")
    if burn_in is None:
        burn_in = h // 10
    if schedule is None:
        schedule = default_banach_schedule(h)
    schedule = tuple(int(l) for l in schedule)
    if not schedule:
        raise ConfigurationError("empty window-length schedule")
    if any(l < 1 or l > h for l in schedule):
        raise ConfigurationError("schedule lengths must lie in [1, horizon]")
    if not 0 <= burn_in < h:
        raise ConfigurationError("burn_in must satisfy 0 <= burn_in < horizon")

    mask = window.mask()
    csum = np.cumsum(mask, dtype=np.int64)          # csum[N] = card(A & [0, N])
    running = csum / np.arange(1, h + 2, dtype=np.float64)
    lower = float(running[burn_in:].min())
    upper = float(running[burn_in:].max())

    banach_curve = []
    for L in sorted(schedule):
        counts = csum[L:].copy()
        counts[1:] -= csum[: h - L]
        banach_curve.append((L, float(counts.max() / (L + 1))))
    l_max = max(schedule)
    raw = dict(banach_curve)[l_max]
    banach = max(raw, upper)

    cert = syndetic_certificate(window) if window.count else None
    curve = tuple((n, float(running[n])) for n in _curve_samples(burn_in, h))
    return DensityReport(
        lower_est=lower,
        upper_est=upper,
        banach_upper_est=banach,
        max_gap=cert.max_gap if cert else None,
        burn_in=burn_in,
        schedule=tuple(sorted(schedule)),
        horizon=h,
        running_density_curve=curve,
        banach_curve=tuple(banach_curve),
        banach_raw=raw,
    )


# ---------------------------------------------------------------------------
# finite-sums sets and the dual-family probe
# ---------------------------------------------------------------------------

def ip_generate(generators: Sequence[int], depth: int, horizon: int) -> IndexWindow:
    """All sums of at most ``depth`` distinct generators, truncated at the horizon.

    Generators must be strictly increasing positive integers.  The result is
    the finite-sums set of the generator list, restricted to sums of at most
    ``depth`` terms and to ``[0, horizon]``.
    """
    gens = list(generators)
    if not gens or depth < 1:
        raise ConfigurationError("need a nonempty generator list and depth >= 1")
    prev = 0
    for g in gens:
        if g <= prev:
            raise ConfigurationError("generators must be strictly increasing positives")
        prev = g
    # min number of terms needed per reachable sum
    terms = {0: 0}
    for g in gens:
        updates = {}
        for s, c in terms.items():
            t = s + g
            if t <= horizon and c + 1 <= depth:
                if terms.get(t, depth + 1) > c + 1 and updates.get(t, depth + 1) > c + 1:
                    updates[t] = c + 1
        for t, c in updates.items():
            if terms.get(t, depth + 1) > c:
                terms[t] = c
    sums = sorted(s for s in terms if s > 0)
    return IndexWindow(tuple(sums), horizon)


@dataclass(frozen=True)
class IpProbeResult:
    """Three-valued outcome of the dual-family membership probe.

    * ``certificate_k``: smallest k found with ``k*N0 & [0,H] <= A``
      (positive evidence; the only positive claim the probe ever makes);
    * ``witness``: strictly increasing generators whose complete finite-sums
      set within the horizon avoids A (negative evidence);
    * neither: inconclusive.
    """

    verdict: str                    # "arithmetic", "falsified", "inconclusive"
    certificate_k: Optional[int] = None
    witness: tuple[int, ...] = ()
    budget_used: int = 0

    @property
    def is_arithmetic(self) -> bool:
        return self.verdict == "arithmetic"

    @property
    def is_falsified(self) -> bool:
        return self.verdict == "falsified"


def arithmetic_certificate(window: IndexWindow) -> Optional[int]:
    """Smallest k found with ``k*N0 & [0,H] <= A`` (k up to sqrt(H) plus the
    gcd of the elements), or None."""
    return _arithmetic_certificate(window)


def _arithmetic_certificate(window: IndexWindow) -> Optional[int]:
    mask = window.mask()
    h = window.horizon
    if not mask[0]:
        return None
    candidates = list(range(1, math.isqrt(h) + 1))
    nz = [e for e in window.elements if e > 0]
    if nz:
        g = 0
        for e in nz:
            g = math.gcd(g, e)
        if g > (candidates[-1] if candidates else 0):
            candidates.append(g)
    for k in candidates:
        if mask[::k].all():
            return k
    return None


def witness_floor(horizon: int) -> int:
    """Minimum generator count for a credible avoidance witness.

    Scales with the horizon: short avoidance prefixes are cheap to find even
    inside genuinely dual-family sets (block sums of any long generator list
    must eventually land in such a set, but only once the list is long and
    its total still fits the horizon).
    """
    return max(8, math.isqrt(horizon) // 2)


def ip_star_probe(window: IndexWindow, budget: int = 4) -> IpProbeResult:
    """Probe whether A meets every finite-sums set, on the observed window.

    Positive direction: scan for an arithmetic certificate ``k*N0 <= A``
    (k up to sqrt(H), plus the gcd of the elements).  Negative direction: up
    to ``budget`` greedy restarts try to grow generators ``g_1 < g_2 < ...``
    whose complete finite-sums set (all subset sums, which stay within the
    horizon by construction) avoids A; a maximal witness with at least
    :func:`witness_floor` generators falsifies.  Anything else is
    inconclusive: finite horizons cannot decide the dual family, so no
    positive claim is made beyond the arithmetic certificate.
    """
    if budget < 1:
        raise ConfigurationError("budget must be >= 1")
    k = _arithmetic_certificate(window)
    if k is not None:
        return IpProbeResult("arithmetic", certificate_k=k)

    h = window.horizon
    mask = window.mask()
    floor = witness_floor(h)
    non_members = np.nonzero(~mask[1:])[0] + 1      # candidates start at 1
    used = 0
    best: tuple[int, ...] = ()
    for restart in range(budget):
        if restart >= len(non_members):
            break
        used += 1
        g0 = int(non_members[restart])
        gens = [g0]
        sums = np.array([g0], dtype=np.int64)
        total = g0
        falsified = False
        while not falsified:
            lo, hi = gens[-1] + 1, h - total
            found = None
            pos = lo
            chunk = max(64, min(4096, (1 << 21) // max(1, sums.size)))
            while pos <= hi:
                cands = np.arange(pos, min(pos + chunk, hi + 1), dtype=np.int64)
                cands = cands[~mask[cands]]
                if cands.size:
                    # admissible iff no translated sum lands in A
                    hit = mask[sums[:, None] + cands[None, :]].any(axis=0)
                    good = cands[~hit]
                    if good.size:
                        found = int(good[0])
                        break
                pos += chunk
            if found is None:
                break
            gens.append(found)
            sums = np.unique(np.concatenate([sums, np.array([found]), sums + found]))
            total += found
            falsified = len(gens) >= floor
        if len(gens) > len(best):
            best = tuple(gens)
        if falsified:
            return IpProbeResult("falsified", witness=tuple(gens), budget_used=used)
    return IpProbeResult("inconclusive", witness=best, budget_used=used)


# ---------------------------------------------------------------------------
# cut-shift-and-paste
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SetPredicate:
    """A storable index predicate: residue classes mod m, union of intervals.

    ``n`` matches when ``n % modulus in residues`` or ``lo <= n <= hi`` for
    some span.  Residue classes and interval unions cover every partition
    used by the transform's consumers while staying serializable.
    """

    modulus: int = 1
    residues: frozenset = frozenset()
    spans: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if any(r < 0 or r >= self.modulus for r in self.residues):
            raise ValueError("residues must lie in [0, modulus)")
        if any(lo > hi or lo < 0 for lo, hi in self.spans):
            raise ValueError("spans must be ordered pairs of naturals")

    @staticmethod
    def everything() -> "SetPredicate":
        return SetPredicate(1, frozenset({0}), ())

    @staticmethod
    def residue_class(modulus: int, *residues: int) -> "SetPredicate":
        return SetPredicate(modulus, frozenset(residues), ())

    @staticmethod
    def intervals(*spans: tuple[int, int]) -> "SetPredicate":
        return SetPredicate(1, frozenset(), tuple(spans))

    def __contains__(self, n: int) -> bool:
        if self.residues and n % self.modulus in self.residues:
            return True
        return any(lo <= n <= hi for lo, hi in self.spans)

    def mask(self, horizon: int) -> np.ndarray:
        m = np.zeros(horizon + 1, dtype=bool)
        if self.residues:
            idx = np.arange(horizon + 1)
            res = np.fromiter(self.residues, dtype=np.int64)
            m |= np.isin(idx % self.modulus, res)
        for lo, hi in self.spans:
            if lo <= horizon:
                m[lo:min(hi, horizon) + 1] = True
        return m


@dataclass(frozen=True)
class CutShiftPaste:
    """A covering family ``I_1..I_q`` of index predicates with shifts ``n_1..n_q``.

    Applying the instance to A yields ``union_j (n_j + A & I_j)``.
    """

    pieces: tuple[SetPredicate, ...]
    shifts: tuple[int, ...]

    def __post_init__(self):
        if len(self.pieces) != len(self.shifts) or not self.pieces:
            raise ValueError("need q >= 1 pieces with matching shifts")
        if any(s < 0 for s in self.shifts):
            raise ValueError("shifts must be naturals")

    @property
    def q(self) -> int:
        return len(self.pieces)

    @property
    def max_shift(self) -> int:
        return max(self.shifts)

    def covers(self, horizon: int) -> bool:
        covered = np.zeros(horizon + 1, dtype=bool)
        for p in self.pieces:
            covered |= p.mask(horizon)
        return bool(covered.all())


def cut_shift_paste(window: IndexWindow, inst: CutShiftPaste) -> IndexWindow:
    """``A -> union_j (n_j + A & I_j)`` on the extended window ``[0, H + max shift]``.

    The pieces must cover ``[0, H]`` (they may overlap); the result is exact
    on the extended horizon.
    """
    h = window.horizon
    if not inst.covers(h):
        raise ConfigurationError("pieces do not cover [0, horizon]")
    elems = np.fromiter(window.elements, dtype=np.int64) if window.count \
        else np.zeros(0, dtype=np.int64)
    out = []
    for pred, shift in zip(inst.pieces, inst.shifts):
        if elems.size:
            sel = pred.mask(h)[elems]
            out.append(elems[sel] + shift)
    merged = np.unique(np.concatenate(out)) if out else np.zeros(0, dtype=np.int64)
    return IndexWindow(tuple(int(x) for x in merged), h + inst.max_shift)


def dilate(window: IndexWindow, p: int) -> IndexWindow:
    """``A -> {p*n : n in A}`` with horizon ``p*H``."""
    if p < 1:
        raise ConfigurationError("dilation factor must be >= 1")
    return IndexWindow(tuple(p * e for e in window.elements), p * window.horizon)


def contract(window: IndexWindow, p: int) -> IndexWindow:
    """``A -> {n : p*n in A}`` with horizon ``H // p``."""
    if p < 1:
        raise ConfigurationError("contraction factor must be >= 1")
    return IndexWindow(tuple(e // p for e in window.elements if e % p == 0),
                       window.horizon // p)
