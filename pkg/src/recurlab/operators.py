"""The operator zoo and the seminorm structures of its spaces.

Every operator here has an exact, finitely representable action:

* ``BlockCycle`` -- the basis-periodic weighted cycle on dyadic index blocks
  ``[2^j, 2^(j+1))``: inside a block each step multiplies by 2 and advances,
  the block end wraps to the block start with weight ``2^-(2^j - 1)``, so the
  weight product around every block is exactly 1 and ``T^(2^j) e_k = e_k``
  holds in exact rational arithmetic.  Index 1 is a fixed point.
* ``WeightedBackwardShift`` -- ``(x_n) -> (w_(n+1) x_(n+1))`` on sparse
  vectors; support moves strictly left (unilateral) and weights accumulate as
  exact products where the rule is rational.
* ``Diagonal`` -- coordinatewise multiplication by ``lambda_n``; rotation
  rules keep the angle separate from the magnitude so unimodular powers never
  drift.
* ``RowRotation`` -- cyclic rotation of each dyadic row of a doubly indexed
  space whose seminorms watch a short strip just right of each row midpoint;
  the distinguished one-hot orbit is evaluated in closed form per block, no
  row is ever materialized.
* ``AffineComposition`` -- ``f -> f(az + b)`` on truncated power series,
  with the symbol iterated exactly: ``phi^n = a^n z + b (a^n - 1)/(a - 1)``.
* ``Matrix`` -- finite-dimensional complex matrices (numpy), with an
  eigenstructure report used by the recurrence criterion for matrices.

``Scaled`` (a unimodular multiple of a base operator) and ``Power`` (p-fold
application per step) wrap any of the above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .rules import Rule
from .values import (ExactSqrt, Phase, Value, abs2, diff_abs2, exact_eq,
                     is_exact, log2_abs, to_complex, vabs, vmul, vpow)

__all__ = [
    "SequenceLp", "SequenceSup", "FiniteDim", "DyadicRowSpace", "EntireCoefficients",
    "SparseVector", "RowState", "FiniteRowVector",
    "BlockCycle", "WeightedBackwardShift", "Diagonal", "RowRotation",
    "AffineComposition", "Matrix", "Scaled", "Power",
    "apply", "power_apply", "seminorm", "diff_seminorm", "exact_state_period",
    "state_exact_eq", "operator_space",
    "eigen_structure", "EigenStructure", "continuity_bound_check",
    "continuity_bound_constant", "PrecisionError", "SpaceMismatch",
]


class PrecisionError(ArithmeticError):
    """Floating mode hit magnitudes it cannot represent; rerun exactly."""


class SpaceMismatch(TypeError):
    pass


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceLp:
    """l^p over N (indices from 1), p in [1, inf)."""
    p: int = 2

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")


@dataclass(frozen=True)
class SequenceSup:
    """c0 over N with the sup norm."""


@dataclass(frozen=True)
class FiniteDim:
    """C^n with the euclidean norm, coordinates indexed 1..n."""
    n: int


@dataclass(frozen=True)
class DyadicRowSpace:
    """Doubly indexed sequences, row k holding 2^k entries.

    Seminorm of index n >= 1:

        p_n(x) = sum_k 2^-k * max_j |x_(k,j)|
               + sum_(k>=2) k * max_(1<=m<=min(n, 2^(k-1)-1)) |x_(k, 2^(k-1)+m)|
    """


@dataclass(frozen=True)
class EntireCoefficients:
    """Truncated power series f = sum c_j z^j with coefficient seminorms.

    Seminorm of index i is q_R(f) = sum |c_j| R^j at R = radii[i], an
    equivalent system for compact convergence evaluated exactly on
    polynomials.
    """
    max_degree: int
    radii: tuple[Fraction, ...] = (Fraction(1), Fraction(2), Fraction(4))

    def __post_init__(self):
        if self.max_degree < 0 or any(r <= 0 for r in self.radii):
            raise ValueError("need max_degree >= 0 and positive radii")


Space = Union[SequenceLp, SequenceSup, FiniteDim, DyadicRowSpace, EntireCoefficients]


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseVector:
    """Finitely supported vector: sorted (index, value) pairs, no zeros."""

    space: Space
    entries: tuple[tuple[int, Value], ...]

    def __post_init__(self):
        prev = None
        for i, v in self.entries:
            if prev is not None and i <= prev:
                raise ValueError("entries must be sorted by distinct index")
            prev = i
        if isinstance(self.space, FiniteDim):
            if self.entries and not (1 <= self.entries[0][0]
                                     and self.entries[-1][0] <= self.space.n):
                raise ValueError("coordinates outside the space dimension")
        if isinstance(self.space, EntireCoefficients):
            if self.entries and self.entries[-1][0] > self.space.max_degree:
                raise ValueError("degree above the space cap")

    @staticmethod
    def unit(space: Space, index: int) -> "SparseVector":
        return SparseVector(space, ((index, Fraction(1)),))

    @staticmethod
    def from_pairs(space: Space, pairs) -> "SparseVector":
        kept = [(int(i), v) for i, v in sorted(pairs) if not _is_zero(v)]
        return SparseVector(space, tuple(kept))

    @cached_property
    def as_dict(self) -> dict:
        return dict(self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for _, v in self.entries)

    def scale(self, factor: Value) -> "SparseVector":
        return SparseVector.from_pairs(
            self.space, ((i, vmul(v, factor)) for i, v in self.entries))

    def add(self, other: "SparseVector") -> "SparseVector":
        if other.space != self.space:
            raise SpaceMismatch("adding vectors from different spaces")
        merged = dict(self.entries)
        for i, v in other.entries:
            if i in merged:
                a, b = merged[i], v
                if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
                    merged[i] = Fraction(a) + Fraction(b)
                else:
                    merged[i] = to_complex(a) + to_complex(b)
            else:
                merged[i] = v
        return SparseVector.from_pairs(self.space, merged.items())

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.complex128)
        for i, v in self.entries:
            out[i - 1] = to_complex(v)
        return out


def _is_zero(v: Value) -> bool:
    if isinstance(v, (int, Fraction)):
        return v == 0
    if isinstance(v, Phase):
        return v.mag == 0
    return v == 0


@dataclass(frozen=True)
class RowState:
    """The distinguished one-hot orbit state of the dyadic row space.

    ``offset = m`` encodes the vector whose row k holds a single 1 at
    position ``(-m) mod 2^k``; offset 0 is the base point (1 at the start of
    every row).  The rotation acts by ``offset -> offset + 1``.  Seminorms
    and differences are evaluated in closed form per block: the first-sum
    mass is the full geometric series (exactly 2 for a full one-hot pattern,
    tail included), the second sum touches finitely many rows.
    """

    offset: int = 0

    @property
    def space(self) -> DyadicRowSpace:
        return DyadicRowSpace()

    @property
    def exact(self) -> bool:
        return True

    def hot_position(self, k: int) -> int:
        return (-self.offset) % (1 << k)

    def materialize(self, max_row: int) -> "FiniteRowVector":
        """Rows k <= max_row of the pattern; the omitted first-sum mass is
        exactly 2^-max_row (certified tail)."""
        entries = {(k, self.hot_position(k)): Fraction(1) for k in range(max_row + 1)}
        return FiniteRowVector(tuple(sorted((k, j, v) for (k, j), v in entries.items())))

    def tail_bound(self, max_row: int) -> Fraction:
        return Fraction(1, 1 << max_row)


@dataclass(frozen=True)
class FiniteRowVector:
    """Finitely supported vector of the dyadic row space: (row, col, value)."""

    entries: tuple[tuple[int, int, Value], ...]

    def __post_init__(self):
        seen = set()
        for k, j, _ in self.entries:
            if k < 0 or not 0 <= j < (1 << k):
                raise ValueError(f"cell ({k},{j}) outside row geometry")
            if (k, j) in seen:
                raise ValueError("duplicate cell")
            seen.add((k, j))

    @property
    def space(self) -> DyadicRowSpace:
        return DyadicRowSpace()

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for _, _, v in self.entries)

    def rotate(self, steps: int = 1) -> "FiniteRowVector":
        moved = tuple(sorted((k, (j - steps) % (1 << k), v) for k, j, v in self.entries))
        return FiniteRowVector(moved)


Vector = Union[SparseVector, RowState, FiniteRowVector]


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockCycle:
    """Weighted cycle on dyadic blocks; every basis vector is periodic."""

    space: Space = SequenceLp(2)

    def step(self, index: int) -> tuple[int, Fraction]:
        """Image index and weight of one application on e_index."""
        if index == 1:
            return 1, Fraction(1)
        j = index.bit_length() - 1
        if index < (1 << (j + 1)) - 1:
            return index + 1, Fraction(2)
        return 1 << j, Fraction(1, 1 << ((1 << j) - 1))

    def jump(self, index: int, n: int) -> tuple[int, Fraction]:
        """Image index and exact weight of ``T^n`` on ``e_index``."""
        if index == 1:
            return 1, Fraction(1)
        j = index.bit_length() - 1
        block, base = 1 << j, 1 << j
        r = index - base
        t = n % block
        if r + t < block:
            return base + r + t, Fraction(2) ** t
        return base + r + t - block, Fraction(2) ** (t - block)


@dataclass(frozen=True)
class WeightedBackwardShift:
    """``(x_n) -> (w_(n+1) x_(n+1))``; unilateral drops what falls off index 1."""

    weights: Rule
    bilateral: bool = False
    space: Space = SequenceLp(2)

    def weight(self, index: int):
        w = self.weights(index)
        if w == 0:
            raise ValueError(f"weight w_{index} vanishes")
        return w

    def weight_product(self, index: int, n: int):
        """prod_(nu=index-n+1..index) w_nu, the weight of T^n on e_index."""
        out: Value = Fraction(1)
        for nu in range(index - n + 1, index + 1):
            out = vmul(out, self.weight(nu))
        return out


@dataclass(frozen=True)
class Diagonal:
    """Coordinatewise multiplication ``x_n -> lambda_n x_n``.

    ``turns`` (a rule giving the rotation angle in turns) produces exactly
    unimodular entries; ``values`` produces plain scalars.  Exactly one of
    the two is set.
    """

    turns: Optional[Rule] = None
    values: Optional[Rule] = None
    space: Space = SequenceLp(2)

    def __post_init__(self):
        if (self.turns is None) == (self.values is None):
            raise ValueError("set exactly one of turns/values")

    def entry(self, index: int) -> Value:
        if self.turns is not None:
            return Phase(Fraction(1), self.turns(index))
        v = self.values(index)
        return v if isinstance(v, Fraction) else float(v)

    def entry_power(self, index: int, n: int) -> Value:
        return vpow(self.entry(index), n)


@dataclass(frozen=True)
class RowRotation:
    """Rotate every dyadic row one step: ``(Tx)_(k,j) = x_(k, (j+1) mod 2^k)``."""

    space: DyadicRowSpace = DyadicRowSpace()


@dataclass(frozen=True)
class AffineComposition:
    """``f -> f(az + b)`` on truncated power series.

    The symbol iterates exactly: ``phi^n(z) = a^n z + b_n`` with
    ``b_n = b (a^n - 1)/(a - 1)`` (``n b`` when a = 1).  Affine symbols
    preserve degree, so the truncation never overflows.
    """

    a: Value
    b: Value
    space: EntireCoefficients = EntireCoefficients(8)

    def symbol_power(self, n: int) -> tuple[Value, complex]:
        an = vpow(self.a, n)
        if exact_eq(self.a, Fraction(1)) or (isinstance(self.a, Phase) and self.a.is_one()):
            return Fraction(1), n * to_complex(self.b)
        if isinstance(an, Phase) and an.is_one():
            return an, 0j
        bn = to_complex(self.b) * (to_complex(an) - 1) / (to_complex(self.a) - 1)
        return an, bn

    def compose(self, x: SparseVector, a_n: Value, b_n: complex) -> SparseVector:
        if b_n == 0 and (exact_eq(a_n, Fraction(1))
                         or (isinstance(a_n, Phase) and a_n.is_one())):
            return x
        deg = self.space.max_degree
        out = np.zeros(deg + 1, dtype=np.complex128)
        ac = to_complex(a_n)
        for j, c in x.entries:
            # c * (a z + b)^j spread over degrees 0..j
            row = np.zeros(j + 1, dtype=np.complex128)
            for m in range(j + 1):
                row[m] = math.comb(j, m) * (ac ** m) * (b_n ** (j - m))
            out[: j + 1] += to_complex(c) * row
        pairs = [(d, out[d]) for d in range(deg + 1) if out[d] != 0]
        return SparseVector(self.space, tuple(pairs))


@dataclass(frozen=True)
class Matrix:
    """Finite-dimensional operator, stored row-major as nested tuples."""

    rows: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")

    @staticmethod
    def from_array(arr) -> "Matrix":
        a = np.asarray(arr, dtype=np.complex128)
        return Matrix(tuple(tuple(complex(x) for x in row) for row in a))

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.complex128)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def space(self) -> FiniteDim:
        return FiniteDim(self.n)

    @cached_property
    def eigen_system(self) -> Optional[tuple]:
        """(S, unit_eigs, S^-1, condition) when usable for closed-form powers."""
        try:
            lam, S = np.linalg.eig(self.array)
        except np.linalg.LinAlgError:
            return None
        try:
            Sinv = np.linalg.inv(S)
        except np.linalg.LinAlgError:
            return None
        cond = float(np.linalg.cond(S))
        if not np.isfinite(cond) or cond > 1e8:
            return None
        if float(np.max(np.abs(self.array - (S * lam) @ Sinv))) > 1e-9 * max(
                1.0, float(np.max(np.abs(self.array)))):
            return None
        return S, lam, Sinv, cond


@dataclass(frozen=True)
class Scaled:
    """``lambda * T`` for a scalar factor, usually unimodular."""

    base: "Operator"
    factor: Value


@dataclass(frozen=True)
class Power:
    """``T^p`` applied as p elementary steps per unit of time."""

    base: "Operator"
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("power must be >= 1")


Operator = Union[BlockCycle, WeightedBackwardShift, Diagonal, RowRotation,
                 AffineComposition, Matrix, Scaled, Power]


def operator_space(op: Operator) -> Space:
    if isinstance(op, (Scaled, Power)):
        return operator_space(op.base)
    return op.space


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------

def _guard_float_weight(weight: Fraction, value: Value) -> Value:
    floating = isinstance(value, (complex, float)) or (
        isinstance(value, Phase) and not isinstance(value.mag, Fraction))
    if floating and abs(log2_abs(weight)) > 980:
        raise PrecisionError(
            "weight magnitude beyond float range; rerun with --precision exact")
    out = vmul(value, weight)
    if floating:
        mag = abs(to_complex(out))
        vanished = mag == 0.0 and weight != 0 and abs(to_complex(value)) != 0.0
        if not math.isfinite(mag) or vanished:
            raise PrecisionError(
                "orbit magnitude left float range; rerun with --precision exact")
    return out


def apply(op: Operator, x: Vector) -> Vector:
    """One exact application of the operator."""
    if isinstance(op, Power):
        for _ in range(op.p):
            x = apply(op.base, x)
        return x
    if isinstance(op, Scaled):
        y = apply(op.base, x)
        if isinstance(y, SparseVector):
            return y.scale(op.factor)
        raise SpaceMismatch("scalar multiples need sparse-representable states")
    if isinstance(op, RowRotation):
        if isinstance(x, RowState):
            return RowState(x.offset + 1)
        if isinstance(x, FiniteRowVector):
            return x.rotate(1)
        raise SpaceMismatch("row rotation acts on row-space vectors")
    if not isinstance(x, SparseVector):
        raise SpaceMismatch(f"{type(op).__name__} acts on sparse vectors")

    if isinstance(op, BlockCycle):
        pairs = {}
        for i, v in x.entries:
            t, w = op.step(i)
            pairs[t] = _guard_float_weight(w, v)
        return SparseVector.from_pairs(x.space, pairs.items())
    if isinstance(op, WeightedBackwardShift):
        pairs = []
        for i, v in x.entries:
            if i == 1 and not op.bilateral:
                continue
            pairs.append((i - 1, vmul(v, op.weight(i))))
        return SparseVector.from_pairs(x.space, pairs)
    if isinstance(op, Diagonal):
        return SparseVector.from_pairs(
            x.space, ((i, vmul(v, op.entry(i))) for i, v in x.entries))
    if isinstance(op, AffineComposition):
        return op.compose(x, op.a, to_complex(op.b))
    if isinstance(op, Matrix):
        vec = x.to_dense(op.n)
        with np.errstate(over="ignore", invalid="ignore"):
            out = op.array @ vec
        return SparseVector.from_pairs(
            x.space, ((i + 1, complex(out[i])) for i in range(op.n)))
    raise SpaceMismatch(f"unsupported operator {type(op).__name__}")


def power_apply(op: Operator, x: Vector, n: int) -> Vector:
    """``T^n x`` through the closed form where one exists, else by iteration."""
    if n == 0:
        return x
    if isinstance(op, Power):
        return power_apply(op.base, x, op.p * n)
    if isinstance(op, Scaled):
        y = power_apply(op.base, x, n)
        factor_n = vpow(op.factor, n)
        if isinstance(y, SparseVector):
            return y.scale(factor_n)
        raise SpaceMismatch("scalar multiples need sparse-representable states")
    if isinstance(op, RowRotation):
        if isinstance(x, RowState):
            return RowState(x.offset + n)
        if isinstance(x, FiniteRowVector):
            return x.rotate(n)
        raise SpaceMismatch("row rotation acts on row-space vectors")
    if isinstance(op, BlockCycle):
        pairs = {}
        for i, v in x.entries:
            t, w = op.jump(i, n)
            prev = pairs.get(t)
            val = _guard_float_weight(w, v)
            pairs[t] = val if prev is None else _merge(prev, val)
        return SparseVector.from_pairs(x.space, pairs.items())
    if isinstance(op, Diagonal):
        return SparseVector.from_pairs(
            x.space, ((i, vmul(v, op.entry_power(i, n))) for i, v in x.entries))
    if isinstance(op, WeightedBackwardShift):
        pairs = []
        for i, v in x.entries:
            if i - n >= 1 or op.bilateral:
                pairs.append((i - n, vmul(v, op.weight_product(i, n))))
        return SparseVector.from_pairs(x.space, pairs)
    if isinstance(op, AffineComposition):
        a_n, b_n = op.symbol_power(n)
        return op.compose(x, a_n, b_n)
    if isinstance(op, Matrix):
        sys = op.eigen_system
        vec = x.to_dense(op.n)
        if sys is not None:
            S, lam, Sinv, _ = sys
            out = S @ (_stable_powers(lam, n) * (Sinv @ vec))
        else:
            out = vec
            for _ in range(n):
                out = op.array @ out
        return SparseVector.from_pairs(
            x.space, ((i + 1, complex(out[i])) for i in range(op.n)))
    raise SpaceMismatch(f"unsupported operator {type(op).__name__}")


def _merge(a: Value, b: Value) -> Value:
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) + Fraction(b)
    return to_complex(a) + to_complex(b)


def _stable_powers(lam: np.ndarray, n: int) -> np.ndarray:
    """Eigenvalue powers via polar form: unimodular entries never drift."""
    mods = np.abs(lam)
    args = np.angle(lam)
    safe = np.where(mods > 0, mods, 1.0)
    logs = n * np.log(safe)
    if np.any(logs > 700):
        raise PrecisionError("matrix power overflows float range")
    out = np.exp(logs) * np.exp(1j * np.mod(n * args, 2 * np.pi))
    return np.where(mods > 0, out, 0.0)


# ---------------------------------------------------------------------------
# exact periodicity
# ---------------------------------------------------------------------------

def state_exact_eq(x: Vector, y: Vector) -> bool:
    """Decidably exact state equality (False when floats are involved)."""
    if isinstance(x, SparseVector) and isinstance(y, SparseVector):
        if x.support != y.support:
            return False
        return all(is_exact(a) and is_exact(b) and exact_eq(a, b)
                   for (_, a), (_, b) in zip(x.entries, y.entries))
    if isinstance(x, RowState) and isinstance(y, RowState):
        return x.offset == y.offset
    if isinstance(x, FiniteRowVector) and isinstance(y, FiniteRowVector):
        cells_x = {(k, j): v for k, j, v in x.entries}
        cells_y = {(k, j): v for k, j, v in y.entries}
        if cells_x.keys() != cells_y.keys():
            return False
        return all(is_exact(a) and is_exact(cells_y[c]) and exact_eq(a, cells_y[c])
                   for c, a in cells_x.items())
    return False


def _phase_order(v: Value) -> Optional[int]:
    """Multiplicative order of an exactly unimodular value, if finite."""
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
        if f == 1:
            return 1
        if f == -1:
            return 2
        return None
    if isinstance(v, Phase) and v.exact and v.mag == 1:
        return v.turns.denominator if isinstance(v.turns, Fraction) else None
    return None


def _period_bound(op: Operator, x: Vector) -> Optional[int]:
    """An exact n with T^n x = x, when one is symbolically available."""
    if isinstance(x, SparseVector) and not x.entries:
        return 1                   # the zero vector is fixed by every operator
    if isinstance(x, FiniteRowVector) and not x.entries:
        return 1
    if isinstance(op, Power):
        b = _period_bound(op.base, x)
        return None if b is None else b // math.gcd(b, op.p)
    if isinstance(op, Scaled):
        b = _period_bound(op.base, x)
        o = _phase_order(op.factor)
        if b is None or o is None:
            return None
        return b * o // math.gcd(b, o)
    if isinstance(op, BlockCycle) and isinstance(x, SparseVector):
        if not x.exact:
            return None
        out = 1
        for i in x.support:
            if i > 1:
                out = _lcm(out, 1 << (i.bit_length() - 1))
        return out
    if isinstance(op, Diagonal) and isinstance(x, SparseVector):
        if not x.exact:
            return None
        out = 1
        for i in x.support:
            o = _phase_order(op.entry(i))
            if o is None:
                return None
            out = _lcm(out, o)
        return out
    if isinstance(op, RowRotation):
        if isinstance(x, FiniteRowVector):
            out = 1
            for k, _, _ in x.entries:
                out = _lcm(out, 1 << k)
            return out
        return None        # the one-hot pattern state never returns exactly
    if isinstance(op, AffineComposition) and isinstance(x, SparseVector):
        if all(i == 0 for i, _ in x.entries):
            return 1
        if exact_eq(op.a, Fraction(1)) or (isinstance(op.a, Phase) and op.a.is_one()):
            return 1 if _is_zero_complex(op.b) else None
        o = _phase_order(op.a)
        return o
    return None


def _is_zero_complex(v: Value) -> bool:
    if isinstance(v, (int, Fraction)):
        return v == 0
    if isinstance(v, Phase):
        return v.mag == 0
    return to_complex(v) == 0


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def exact_state_period(op: Operator, x: Vector) -> Optional[int]:
    """Minimal exact period of x under the operator, or None.

    Starts from a symbolic bound (block sizes, phase orders, symbol orders)
    and minimizes over its divisors with exact state comparisons.  Floating
    data never yields a period.
    """
    bound = _period_bound(op, x)
    if bound is None:
        return None
    best = bound
    for d in sorted(_divisors(bound)):
        if d < best and state_exact_eq(power_apply(op, x, d), x):
            best = d
            break
    return best


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return out


# ---------------------------------------------------------------------------
# seminorms
# ---------------------------------------------------------------------------

def seminorm(space: Space, index: int, x: Vector):
    """Seminorm of the given index; exact (Fraction/ExactSqrt) where possible."""
    if isinstance(space, DyadicRowSpace):
        return _row_seminorm(index, x)
    if not isinstance(x, SparseVector):
        raise SpaceMismatch("expected a sparse vector")
    if isinstance(space, (SequenceLp, FiniteDim)):
        p = space.p if isinstance(space, SequenceLp) else 2
        return _lp_norm(p, (v for _, v in x.entries))
    if isinstance(space, SequenceSup):
        vals = [vabs(v) for _, v in x.entries]
        return _max_abs(vals)
    if isinstance(space, EntireCoefficients):
        radius = space.radii[index]
        total = 0.0
        exact_total = Fraction(0)
        exact_ok = True
        for d, v in x.entries:
            a = vabs(v)
            if isinstance(a, Fraction):
                exact_total += a * radius ** d
            else:
                exact_ok = False
                total += float(a) * float(radius) ** d
        if exact_ok:
            return exact_total
        return total + float(exact_total)
    raise SpaceMismatch(f"unknown space {space!r}")


def _lp_norm(p: int, values):
    vals = list(values)
    if p == 2:
        total = Fraction(0)
        exact_ok = True
        float_total = 0.0
        for v in vals:
            a2 = abs2(v)
            if isinstance(a2, Fraction):
                total += a2
            else:
                exact_ok = False
                float_total += float(a2)
        if exact_ok:
            return ExactSqrt(total)
        return math.sqrt(float_total + float(total))
    if p == 1:
        total = Fraction(0)
        exact_ok = True
        float_total = 0.0
        for v in vals:
            a = vabs(v)
            if isinstance(a, Fraction):
                total += a
            else:
                exact_ok = False
                float_total += float(a)
        return total if exact_ok else float_total + float(total)
    return sum(float(vabs(v)) ** p for v in vals) ** (1.0 / p)


def _max_abs(vals):
    out: Value = Fraction(0)
    exact_ok = True
    float_out = 0.0
    for a in vals:
        if isinstance(a, Fraction):
            out = max(out, a)
        else:
            exact_ok = False
            float_out = max(float_out, float(a))
    return out if exact_ok else max(float_out, float(out))


def diff_seminorm(space: Space, index: int, x: Vector, y: Vector):
    """Seminorm of ``x - y`` without forming the difference inexactly."""
    if isinstance(space, DyadicRowSpace):
        return _row_diff_seminorm(index, x, y)
    if not (isinstance(x, SparseVector) and isinstance(y, SparseVector)):
        raise SpaceMismatch("expected sparse vectors")
    xd, yd = x.as_dict, y.as_dict
    support = sorted(set(xd) | set(yd))
    if isinstance(space, (SequenceLp, FiniteDim)):
        p = space.p if isinstance(space, SequenceLp) else 2
        if p == 2:
            total = Fraction(0)
            exact_ok = True
            float_total = 0.0
            for i in support:
                d2 = diff_abs2(xd.get(i, Fraction(0)), yd.get(i, Fraction(0)))
                if isinstance(d2, Fraction):
                    total += d2
                else:
                    exact_ok = False
                    float_total += float(d2)
            if exact_ok:
                return ExactSqrt(total)
            return math.sqrt(float_total + float(total))
        diffs = [_abs_diff(xd.get(i, Fraction(0)), yd.get(i, Fraction(0)))
                 for i in support]
        if p == 1:
            return _sum_maybe_exact(diffs)
        return sum(float(d) ** p for d in diffs) ** (1.0 / p)
    if isinstance(space, SequenceSup):
        return _max_abs([_abs_diff(xd.get(i, Fraction(0)), yd.get(i, Fraction(0)))
                         for i in support])
    if isinstance(space, EntireCoefficients):
        radius = space.radii[index]
        diffs = [(i, _abs_diff(xd.get(i, Fraction(0)), yd.get(i, Fraction(0))))
                 for i in support]
        return _sum_maybe_exact([_scale_pow(a, radius, d) for d, a in diffs])
    raise SpaceMismatch(f"unknown space {space!r}")


def _scale_pow(a, radius: Fraction, d: int):
    if isinstance(a, Fraction):
        return a * radius ** d
    return float(a) * float(radius) ** d


def _abs_diff(a: Value, b: Value):
    d2 = diff_abs2(a, b)
    if isinstance(d2, Fraction):
        num = math.isqrt(d2.numerator)
        den = math.isqrt(d2.denominator)
        if num * num == d2.numerator and den * den == d2.denominator:
            return Fraction(num, den)
        return float(ExactSqrt(d2))
    return math.sqrt(d2)


def _sum_maybe_exact(vals):
    total = Fraction(0)
    exact_ok = True
    float_total = 0.0
    for v in vals:
        if isinstance(v, Fraction):
            total += v
        else:
            exact_ok = False
            float_total += float(v)
    return total if exact_ok else float_total + float(total)


# -- dyadic row space closed forms ------------------------------------------

def _watch_hit(pos: int, k: int, index: int) -> bool:
    """Is column ``pos`` of row k inside the watched strip of p_index?"""
    half = 1 << (k - 1)
    reach = min(index, half - 1)
    return half + 1 <= pos <= half + reach


def _pattern_watch_rows(offset: int, index: int) -> list[int]:
    """Rows whose hot cell sits in the watched strip, for a pattern state."""
    hits = []
    k = 2
    while (1 << (k - 1)) <= offset + index:
        pos = (-offset) % (1 << k)
        if _watch_hit(pos, k, index):
            hits.append(k)
        k += 1
    return hits


def _row_seminorm(index: int, x: Vector):
    if index < 1:
        raise ValueError("seminorm index must be >= 1")
    if isinstance(x, RowState):
        first = Fraction(2)      # sum_k 2^-k over the full one-hot pattern
        second = sum(_pattern_watch_rows(x.offset, index))
        return first + second
    if isinstance(x, FiniteRowVector):
        rows: dict[int, list] = {}
        for k, j, v in x.entries:
            rows.setdefault(k, []).append((j, v))
        first_parts = []
        second_parts = []
        for k, cells in rows.items():
            peak = _max_abs([vabs(v) for _, v in cells])
            first_parts.append(_scale_pow(peak, Fraction(1, 1 << k), 1))
            if k >= 2:
                watched = [vabs(v) for j, v in cells if _watch_hit(j, k, index)]
                if watched:
                    second_parts.append(_scale_pow(_max_abs(watched), Fraction(k), 1))
        return _sum_maybe_exact(first_parts + second_parts)
    raise SpaceMismatch("row seminorms apply to row-space vectors")


def _row_diff_seminorm(index: int, x: Vector, y: Vector):
    if isinstance(x, RowState) and isinstance(y, RowState):
        if x.offset == y.offset:
            return Fraction(0)
        delta = abs(x.offset - y.offset)
        v2 = (delta & -delta).bit_length() - 1
        first = Fraction(1, 1 << v2)     # rows k > v2 disagree, each once
        rows = set(_pattern_watch_rows(x.offset, index)) | \
            set(_pattern_watch_rows(y.offset, index))
        second = sum(k for k in rows if (delta % (1 << k)) != 0)
        return first + second
    if isinstance(x, RowState):
        rows = max(_needed_rows(y, index), (x.offset + index).bit_length() + 2)
        # materialization is exact on the touched rows; the omitted rows of the
        # pattern contribute exactly their first-sum mass 2^-rows
        tail = Fraction(1, 1 << rows)
        return _row_diff_seminorm(index, x.materialize(rows), y) + tail
    if isinstance(y, RowState):
        return _row_diff_seminorm(index, y, x)
    cells: dict[tuple[int, int], list] = {}
    for k, j, v in x.entries:
        cells.setdefault((k, j), [Fraction(0), Fraction(0)])[0] = v
    for k, j, v in y.entries:
        cells.setdefault((k, j), [Fraction(0), Fraction(0)])[1] = v
    entries = tuple(sorted((k, j, _signed_diff(a, b))
                           for (k, j), (a, b) in cells.items()
                           if not _diff_is_zero(a, b)))
    return _row_seminorm(index, FiniteRowVector(entries))


def _needed_rows(x: FiniteRowVector, index: int) -> int:
    top = max((k for k, _, _ in x.entries), default=1)
    return max(top + 1, index.bit_length() + 2, 8)


def _signed_diff(a: Value, b: Value):
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return Fraction(a) - Fraction(b)
    return to_complex(a) - to_complex(b)


def _diff_is_zero(a: Value, b: Value) -> bool:
    if is_exact(a) and is_exact(b):
        return exact_eq(a, b)
    return to_complex(a) == to_complex(b)


# ---------------------------------------------------------------------------
# continuity bound for the row rotation
# ---------------------------------------------------------------------------

def continuity_bound_constant(index: int) -> tuple[int, int]:
    """(l, constant) with l minimal so 2^l >= 2(index+2); bound is 1+(l-1)2^(l-1)."""
    l = 2
    while (1 << l) < 2 * (index + 2):
        l += 1
    return l, 1 + (l - 1) * (1 << (l - 1))


def continuity_bound_check(x: Vector, index: int) -> bool:
    """Verify ``p_n(Tx) <= (1+(l-1) 2^(l-1)) p_(n+1)(x)`` on a row-space vector."""
    _, c = continuity_bound_constant(index)
    lhs = _row_seminorm(index, apply(RowRotation(), x))
    rhs = _row_seminorm(index + 1, x)
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        return lhs <= c * rhs
    return float(lhs) <= c * float(rhs) * (1 + 1e-12)


# ---------------------------------------------------------------------------
# matrix eigenstructure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenStructure:
    """Clustered eigenvalues with algebraic/geometric multiplicities."""

    eigenvalues: tuple[complex, ...]
    algebraic: tuple[int, ...]
    geometric: tuple[int, ...]
    diagonalizable: bool
    all_unimodular: bool
    tolerance: float


class NumericalFailure(ArithmeticError):
    pass


def eigen_structure(mat: Matrix, tolerance: float = 1e-10,
                    cluster_tol: float = 1e-7, dim_cap: int = 64) -> EigenStructure:
    """Eigenvalues with multiplicities, a diagonalizability flag, and an
    all-unimodular flag at the given tolerance."""
    if mat.n > dim_cap:
        raise NumericalFailure(f"dimension {mat.n} above cap {dim_cap}")
    a = mat.array
    try:
        lam = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as err:
        raise NumericalFailure(f"eigenvalue iteration failed: {err}") from err
    order = np.lexsort((lam.imag, lam.real))
    lam = lam[order]
    clusters: list[list[complex]] = []
    for value in lam:
        if clusters and abs(value - clusters[-1][-1]) <= cluster_tol:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    reps, alg, geo = [], [], []
    scale = max(1.0, float(np.max(np.abs(a))))
    for group in clusters:
        rep = complex(np.mean(group))
        reps.append(rep)
        alg.append(len(group))
        shifted = a - rep * np.eye(mat.n)
        sv = np.linalg.svd(shifted, compute_uv=False)
        rank = int(np.sum(sv > max(cluster_tol * scale, 1e-12)))
        geo.append(mat.n - rank)
    diagonalizable = all(g >= m for g, m in zip(geo, alg)) and sum(geo) >= mat.n
    unimodular = all(abs(abs(r) - 1.0) <= tolerance for r in reps)
    return EigenStructure(tuple(reps), tuple(alg), tuple(geo),
                          diagonalizable, unimodular, tolerance)
