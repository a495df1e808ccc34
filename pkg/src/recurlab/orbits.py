"""Orbit iteration, return-set extraction, boundedness and compactness probes.

The central computation is the distance profile ``n -> max_i p_i(T^n x - x)``
for ``n <= N`` and a finite set of seminorm indices.  The dispatcher picks
the cheapest sound strategy:

* exact periodic states (block cycles, rational-angle diagonals, affine
  symbols of finite order, and their scalar multiples and powers) are
  evaluated over one period and tiled, so the cost is O(period) not O(N);
* rotation-type operators (diagonals, unimodular multiples of a periodic
  base, diagonalizable matrices) get vectorized closed forms in which the
  angle of every eigenvalue power is reduced exactly, never iterated;
* the distinguished row-rotation orbit is evaluated blockwise in closed
  form (its profile values are dyadic rationals, exact in float64);
* everything else falls back to stepwise application, which stays exact for
  exact sparse data.

Membership in the epsilon ball is decided through exact comparisons whenever
the profile is exact: a pessimistic certified tail is added where closed
forms omit one (never the other way), so a reported return is never false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .families import IndexWindow
from .operators import (Diagonal, FiniteDim, Matrix, Operator, Power,
                        RowRotation, RowState, Scaled, SequenceLp,
                        SparseVector, Vector, apply, diff_seminorm,
                        exact_state_period, operator_space, power_apply,
                        seminorm)
from .values import ExactSqrt, Phase, norm_lt, to_complex, vabs

__all__ = [
    "ReturnSetRecord", "GrowthCurve", "CoveringReport", "PowerBoundVerdict",
    "return_set", "distance_profile", "orbit_growth", "orbit_norms",
    "power_bounded_probe", "totally_bounded_probe",
]

_PERIOD_CAP = 1 << 22


@dataclass(frozen=True)
class DistanceProfile:
    """Distances ``max_i p_i(T^n x - x)`` for n <= horizon.

    ``period`` set means the profile repeats exactly with that period and
    ``values`` holds one period; otherwise ``values`` has horizon+1 entries.
    ``exact`` marks decisions that are independent of floating error.
    """

    values: Union[tuple, np.ndarray]
    horizon: int
    period: Optional[int] = None
    exact: bool = False

    def value(self, n: int):
        if self.period is not None:
            return self.values[n % self.period]
        return self.values[n]

    def window(self, eps) -> IndexWindow:
        bound = Fraction(eps) if not isinstance(eps, Fraction) else eps
        if self.period is not None:
            hits = [r for r in range(self.period) if norm_lt(self.values[r], bound)]
            elems = []
            for r in hits:
                elems.extend(range(r, self.horizon + 1, self.period))
            return IndexWindow(tuple(sorted(elems)), self.horizon)
        if isinstance(self.values, np.ndarray):
            idx = np.nonzero(self.values < float(bound))[0]
            return IndexWindow(tuple(int(i) for i in idx), self.horizon)
        elems = [n for n, v in enumerate(self.values) if norm_lt(v, bound)]
        return IndexWindow(tuple(elems), self.horizon)


@dataclass(frozen=True)
class ReturnSetRecord:
    """A computed return set with the context needed to replay it."""

    operator: Operator
    vector: Vector
    epsilon: Fraction
    seminorm_indices: tuple[int, ...]
    horizon: int
    window: IndexWindow
    exact: bool
    exact_period: Optional[int]

    def __post_init__(self):
        if 0 not in self.window.member_set:
            raise AssertionError("0 must belong to every return window")

    def to_text(self, operator_literal: str = "", vector_literal: str = "") -> str:
        head = [
            f"operator={operator_literal or type(self.operator).__name__}",
            f"vector={vector_literal}",
            f"epsilon={self.epsilon}",
            f"seminorms={','.join(str(i) for i in self.seminorm_indices)}",
            f"N={self.horizon}",
        ]
        return "\n".join(head) + "\n" + self.window.to_text()


def return_set(op: Operator, x: Vector, eps, seminorms: Sequence[int] = (0,),
               N: int = 1000) -> ReturnSetRecord:
    """Window ``{n <= N : max_i p_i(T^n x - x) < eps}``; 0 always belongs."""
    if N < 1:
        raise ValueError("N must be >= 1")
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    prof = distance_profile(op, x, tuple(seminorms), N)
    return ReturnSetRecord(
        operator=op, vector=x, epsilon=eps,
        seminorm_indices=tuple(seminorms), horizon=N,
        window=prof.window(eps), exact=prof.exact, exact_period=prof.period)


# ---------------------------------------------------------------------------
# distance profiles
# ---------------------------------------------------------------------------

def distance_profile(op: Operator, x: Vector, seminorms: tuple[int, ...],
                     N: int) -> DistanceProfile:
    period = exact_state_period(op, x)
    if period is not None and period <= min(N + 1, _PERIOD_CAP):
        vals = tuple(_distance_at(op, x, seminorms, r) for r in range(period))
        return DistanceProfile(vals, N, period=period, exact=True)

    base, factor, stride = _peel(op)
    if isinstance(base, RowRotation) and isinstance(x, RowState) and factor is None:
        return _rowstate_profile(x, seminorms, N, stride)
    if isinstance(base, Diagonal) and _l2_like(operator_space(base)) \
            and isinstance(x, SparseVector):
        return _diagonal_profile(base, factor, stride, x, N)
    if isinstance(base, Matrix):
        merged = base if factor is None else Matrix.from_array(
            to_complex(factor) * base.array)
        if merged.eigen_system is not None:
            return _matrix_profile(merged, stride, x, N)
    scaled = _scaled_periodic_base(op, x)
    if scaled is not None:
        inner, fac, stride_, p = scaled
        return scaled_profile(inner, fac, stride_, p, x, seminorms, N)
    return _stepwise_profile(op, x, seminorms, N)


def _peel(op: Operator):
    """Split Scaled/Power wrappers: (base, accumulated factor, stride)."""
    factor = None
    stride = 1
    while isinstance(op, (Scaled, Power)):
        if isinstance(op, Power):
            stride *= op.p
            op = op.base
        else:
            f = op.factor
            factor = f if factor is None else _mul_factor(factor, f)
            op = op.base
    return op, factor, stride


def _mul_factor(a, b):
    if isinstance(a, Phase) or isinstance(b, Phase):
        return (a * b) if isinstance(a, Phase) else (b * a)
    return to_complex(a) * to_complex(b)


def _l2_like(space) -> bool:
    return isinstance(space, (FiniteDim,)) or (
        isinstance(space, SequenceLp) and space.p == 2)


def _distance_at(op: Operator, x: Vector, seminorms: tuple[int, ...], n: int):
    y = power_apply(op, x, n)
    space = _vector_space(x)
    vals = [diff_seminorm(space, i, y, x) for i in seminorms]
    return _max_norm(vals)


def _vector_space(x: Vector):
    return x.space


def _norm_gt(a, b) -> bool:
    if isinstance(a, (Fraction, ExactSqrt)) and isinstance(b, (Fraction, ExactSqrt)):
        asq = a.sq if isinstance(a, ExactSqrt) else a * a
        bsq = b.sq if isinstance(b, ExactSqrt) else b * b
        return asq > bsq
    return float(a) > float(b)


def _max_norm(vals):
    best = vals[0]
    for v in vals[1:]:
        if _norm_gt(v, best):
            best = v
    return best


def _stepwise_profile(op: Operator, x: Vector, seminorms: tuple[int, ...],
                      N: int) -> DistanceProfile:
    space = _vector_space(x)
    vals = []
    y = x
    exact = True
    for n in range(N + 1):
        if n:
            y = apply(op, y)
        d = _max_norm([diff_seminorm(space, i, y, x) for i in seminorms])
        exact = exact and isinstance(d, (Fraction, ExactSqrt))
        vals.append(d)
    return DistanceProfile(tuple(vals), N, exact=exact)


# -- row rotation pattern ----------------------------------------------------

def _rowstate_profile(x: RowState, seminorms: tuple[int, ...], N: int,
                      stride: int) -> DistanceProfile:
    """Profile of the one-hot pattern: 2^-v2(n) plus integer watch hits.

    Every profile value is a dyadic rational with small exponent, so the
    float64 array below is exact, and the window decisions are too.
    """
    n = np.arange(0, N + 1, dtype=np.int64) * stride
    shifted = n + x.offset
    lowbit = np.where(n > 0, n & -n, 1).astype(np.float64)
    first = np.where(n > 0, 1.0 / lowbit, 0.0)
    out = np.array(first)
    top = int(max(seminorms))
    kcap = int(shifted.max() + top).bit_length() + 1
    extra = np.zeros_like(first)
    for k in range(2, kcap + 1):
        block = 1 << k
        half = block >> 1
        reach = min(top, half - 1)
        if reach < 1:
            continue
        pos_a = (-(shifted)) % block
        pos_b = (-(x.offset)) % block
        hit_a = (pos_a >= half + 1) & (pos_a <= half + reach)
        hit_b = (pos_b >= half + 1) & (pos_b <= half + reach)
        differs = (n % block) != 0
        extra = extra + np.where(differs & (hit_a | hit_b), float(k), 0.0)
    out = out + extra
    out[n == 0] = 0.0
    return DistanceProfile(out, N, exact=True)


# -- diagonal closed form ----------------------------------------------------

def _diagonal_profile(op: Diagonal, factor, stride: int, x: SparseVector,
                      N: int) -> DistanceProfile:
    """l2 distance of a diagonal (optionally scaled) orbit, vectorized in n.

    Coordinate j contributes |x_j|^2 |f^n lam_j^n - 1|^2; angles of each
    power are reduced modulo one turn before exponentiation, so unimodular
    rotations never drift.
    """
    n = np.arange(0, N + 1, dtype=np.float64) * stride
    total = np.zeros_like(n)
    for idx, v in x.entries:
        lam = op.entry(idx)
        lam_c = to_complex(lam)
        f_c = to_complex(factor) if factor is not None else 1.0 + 0j
        mod = abs(lam_c) * abs(f_c)
        ang = (math.atan2(lam_c.imag, lam_c.real)
               + math.atan2(f_c.imag, f_c.real)) / (2 * math.pi)
        amp2 = float(vabs(v)) ** 2
        theta = 2 * math.pi * np.mod(n * ang, 1.0)
        if abs(mod - 1.0) < 1e-15:
            total += amp2 * (2.0 - 2.0 * np.cos(theta))
        else:
            # clip so r*r stays finite; anything this large is out of any ball
            logs = np.clip(n * math.log(mod), -745.0, 340.0)
            r = np.exp(logs)
            total += amp2 * (r * r - 2.0 * r * np.cos(theta) + 1.0)
    out = np.sqrt(np.maximum(total, 0.0))
    out[0] = 0.0
    return DistanceProfile(out, N, exact=False)


# -- matrix closed form ------------------------------------------------------

def _matrix_profile(mat: Matrix, stride: int, x: SparseVector,
                    N: int) -> DistanceProfile:
    S, lam, Sinv, _ = mat.eigen_system
    vec = x.to_dense(mat.n)
    c = Sinv @ vec
    n = np.arange(0, N + 1, dtype=np.float64) * stride
    mods = np.abs(lam)
    angs = np.angle(lam) / (2 * math.pi)
    powers = np.empty((len(n), mat.n), dtype=np.complex128)
    for j in range(mat.n):
        theta = 2 * math.pi * np.mod(n * angs[j], 1.0)
        if abs(mods[j] - 1.0) < 1e-15:
            radial = 1.0
        else:
            # clipped so downstream squares stay finite
            logs = np.clip(n * math.log(max(mods[j], 1e-300)), -745.0, 340.0)
            radial = np.exp(logs)
        powers[:, j] = radial * np.exp(1j * theta)
    diffs = (powers - 1.0) * c[None, :]
    out = np.linalg.norm(diffs @ S.T, axis=1)
    out[0] = 0.0
    return DistanceProfile(out, N, exact=False)


# -- unimodular multiple of an exactly periodic base --------------------------

def _scaled_periodic_base(op: Operator, x: Vector):
    """Detect ``factor * T`` with T having an exact periodic state at x."""
    base, factor, stride = _peel(op)
    if factor is None or not isinstance(x, SparseVector):
        return None
    if not _l2_like(operator_space(base)):
        return None
    inner = Power(base, stride) if stride > 1 else base
    p = exact_state_period(inner, x)
    if p is None or p > 1 << 16:
        return None
    return inner, factor, stride, p


def scaled_profile(base: Operator, factor, stride: int, period: int,
                   x: SparseVector, seminorms: tuple[int, ...],
                   N: int) -> DistanceProfile:
    """Distances for ``(factor T)^(stride n) x`` when the powered base orbit
    ``T^(stride n) x`` cycles exactly.

    With s_r the r-th state of the cycle, the squared distance at step n
    (r = n mod period, total scalar exponent m = stride n) is

        |f|^2m |s_r|^2 - 2 Re(f^m <s_r, x>) + |x|^2,

    evaluated per residue class with exactly reduced angles.
    """
    states = [x]
    for _ in range(period - 1):
        states.append(apply(base, states[-1]))
    f_c = to_complex(factor)
    mod, ang = abs(f_c), math.atan2(f_c.imag, f_c.real) / (2 * math.pi)
    x2 = float(_norm2(x))
    out = np.empty(N + 1, dtype=np.float64)
    for r, s in enumerate(states):
        ms = np.arange(r, N + 1, period, dtype=np.float64) * stride
        inner = _inner(s, x)
        s2 = float(_norm2(s))
        theta = 2 * math.pi * np.mod(ms * ang, 1.0)
        if abs(mod - 1.0) < 1e-15:
            radial = np.ones_like(ms)
        else:
            radial = np.exp(np.clip(ms * math.log(max(mod, 1e-300)), -745.0, 340.0))
        re = np.cos(theta) * inner.real - np.sin(theta) * inner.imag
        d2 = radial * radial * s2 - 2.0 * radial * re + x2
        out[r::period] = np.sqrt(np.maximum(d2, 0.0))
    out[0] = 0.0
    return DistanceProfile(out, N, exact=False)


def _norm2(x: SparseVector) -> float:
    return sum(abs(to_complex(v)) ** 2 for _, v in x.entries)


def _inner(a: SparseVector, b: SparseVector) -> complex:
    bd = b.as_dict
    out = 0j
    for i, v in a.entries:
        if i in bd:
            out += to_complex(v) * to_complex(bd[i]).conjugate()
    return out


# ---------------------------------------------------------------------------
# growth and boundedness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthCurve:
    """Sampled orbit seminorm values with a bounded-or-growing verdict.

    ``records`` is the subsequence of strict prefix maxima (n >= 1); the
    verdict is a growth witness when records keep appearing deep into the
    horizon (at least three, the last in the final three quarters).
    """

    samples: tuple[tuple[int, float], ...]
    records: tuple[tuple[int, float], ...]
    growing: bool
    bound: float

    @property
    def verdict(self) -> str:
        return "growth-witness" if self.growing else f"bounded-within({self.bound:.6g})"


def growth_schedule(N: int, density: int = 96) -> list[int]:
    ns = {0, 1, 2, 3, 4, N}
    v = 1.0
    ratio = max(1.02, (N / 4) ** (1.0 / density)) if N > 8 else 2.0
    while v < N:
        ns.add(int(v))
        v *= ratio
    k = 2
    while (1 << (k - 1)) - 1 <= N:
        for cand in ((1 << (k - 1)) - 1, (1 << (k - 1)) + 1):
            if 0 <= cand <= N:
                ns.add(cand)
        k += 1
    return sorted(ns)


def orbit_growth(op: Operator, x: Vector, seminorm_index: int = 0,
                 N: int = 10_000) -> GrowthCurve:
    """Sample ``p(T^n x)`` on a logarithmic schedule plus the dyadic probes."""
    space = _vector_space(x)
    samples = []
    for n in growth_schedule(N):
        y = power_apply(op, x, n)
        samples.append((n, float(seminorm(space, seminorm_index, y))))
    records = []
    best = -math.inf
    for n, v in samples:
        threshold = best * (1 + 1e-12) if best > 0 else best
        if v > threshold:
            if n >= 1:
                records.append((n, v))
            best = v
    growing = len(records) >= 3 and records[-1][0] >= N // 4
    bound = max(v for _, v in samples)
    return GrowthCurve(tuple(samples), tuple(records), growing, bound)


def orbit_norms(op: Operator, x: Vector, seminorm_index: int, N: int) -> np.ndarray:
    """Float norms of the whole orbit prefix (overflow saturates to inf)."""
    space = _vector_space(x)
    period = exact_state_period(op, x)
    steps = min(N, period - 1) if period is not None else N
    out = np.empty(N + 1, dtype=np.float64)
    y = x
    for n in range(steps + 1):
        if n:
            y = apply(op, y)
        try:
            out[n] = float(seminorm(space, seminorm_index, y))
        except OverflowError:
            out[n] = math.inf
    if period is not None and steps < N:
        tiles = out[:period]
        for n in range(steps + 1, N + 1):
            out[n] = tiles[n % period]
    return out


@dataclass(frozen=True)
class PowerBoundVerdict:
    """Sample-relative equiboundedness: never a global claim."""

    equibounded: bool
    bound: float
    witness_n: Optional[int] = None
    witness_index: Optional[int] = None

    @property
    def verdict(self) -> str:
        if self.equibounded:
            return f"equibounded-on-sample({self.bound:.6g})"
        return f"violation(n={self.witness_n}, sample={self.witness_index})"


def power_bounded_probe(op: Operator, samples: Sequence[Vector], N: int,
                        seminorm_index: int = 0,
                        ratio_cap: float = 1e3) -> PowerBoundVerdict:
    """Sup of orbit-norm ratios over the sample; a witness past the cap fails."""
    if not samples:
        raise ValueError("need a nonempty sample")
    worst = 0.0
    for si, x in enumerate(samples):
        norms = orbit_norms(op, x, seminorm_index, N)
        base = norms[0]
        if base == 0:
            continue
        ratios = norms / base
        n_bad = int(np.argmax(ratios))
        if ratios[n_bad] > ratio_cap:
            return PowerBoundVerdict(False, float(ratios[n_bad]), n_bad, si)
        worst = max(worst, float(ratios[n_bad]))
    return PowerBoundVerdict(True, worst)


@dataclass(frozen=True)
class CoveringReport:
    """Greedy net sizes per epsilon, at doubling horizon prefixes."""

    counts: tuple[tuple[float, tuple[tuple[int, int], ...]], ...]

    def at(self, eps: float) -> tuple[tuple[int, int], ...]:
        for e, rows in self.counts:
            if abs(e - eps) < 1e-12:
                return rows
        raise KeyError(eps)

    def flat(self, eps: float, slack: int = 1) -> bool:
        rows = self.at(eps)
        return rows[-1][1] - rows[0][1] <= slack


def totally_bounded_probe(op: Operator, x: Vector, N: int,
                          eps_grid: Sequence[float]) -> CoveringReport:
    """Greedy epsilon-net sizes of the orbit prefix, at N//4, N//2 and N."""
    pts = _materialized_orbit(op, x, N)
    marks = sorted({max(1, N // 4), max(1, N // 2), N})
    out = []
    for eps in eps_grid:
        centers: list[np.ndarray] = []
        rows = []
        mark_iter = iter(marks)
        next_mark = next(mark_iter)
        for n in range(N + 1):
            p = pts[n]
            if not centers or min(float(np.linalg.norm(p - c)) for c in centers) > eps:
                centers.append(p)
            while next_mark is not None and n == next_mark:
                rows.append((n, len(centers)))
                next_mark = next(mark_iter, None)
        if not rows or rows[-1][0] != N:
            rows.append((N, len(centers)))
        out.append((float(eps), tuple(rows)))
    return CoveringReport(tuple(out))


def _materialized_orbit(op: Operator, x: Vector, N: int) -> np.ndarray:
    if not isinstance(x, SparseVector):
        raise ValueError("compactness probe needs materializable states")
    states = [x]
    y = x
    period = exact_state_period(op, x)
    steps = min(N, period - 1) if period is not None else N
    for _ in range(steps):
        y = apply(op, y)
        states.append(y)
    support = sorted({i for s in states for i in s.support})
    pos = {i: k for k, i in enumerate(support)}
    arr = np.zeros((N + 1, max(1, len(support))), dtype=np.complex128)
    for n in range(N + 1):
        s = states[n % period] if period is not None else states[n]
        for i, v in s.entries:
            arr[n, pos[i]] = to_complex(v)
    return arr
