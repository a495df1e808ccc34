"""Theorem harness: finite-horizon checks with replayable outcomes.

Each check packages one computable statement about the zoo (a return-set
identity, a criterion-versus-simulation agreement, a closure property, a
series dichotomy) and reports Pass, Fail with a replayable witness, or
Skipped with a reason.  Sampling is always driven by an explicit seed that
the outcome embeds; rerunning a Fail with its inputs reproduces it.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .families import (CutShiftPaste, IndexWindow, SetPredicate, contract,
                       cut_shift_paste, density_report, ip_star_probe,
                       syndetic_certificate)
from .classify import Label, Thresholds, classify, window_evidence
from .operators import (Diagonal, Matrix, NumericalFailure, Operator, Power,
                        Scaled, SequenceLp, SparseVector, Vector,
                        WeightedBackwardShift, apply, diff_seminorm,
                        eigen_structure, exact_state_period, operator_space,
                        power_apply, seminorm)
from .orbits import growth_schedule, return_set
from .rules import Rule
from .values import Phase, to_complex, vabs

__all__ = [
    "CheckOutcome", "kronecker_return_check", "matrix_criterion_check",
    "diagonal_criterion_check", "eigenvector_span_check",
    "power_consistency_check", "scaling_consistency_check",
    "shift_series_check", "cut_shift_paste_check",
    "minimality_separation_check", "translation_invariance_check",
    "kronecker_window",
]

PASS, FAIL, SKIP = "pass", "fail", "skipped"


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    status: str
    metrics: dict
    witness: Optional[dict] = None
    reason: Optional[str] = None
    fingerprint: str = ""
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _fingerprint(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
    return h.hexdigest()[:16]


def _outcome(name, ok, metrics, witness=None, seed=None, parts=()):
    return CheckOutcome(
        name=name, status=PASS if ok else FAIL, metrics=metrics,
        witness=None if ok else (witness or {}),
        fingerprint=_fingerprint(name, *parts), seed=seed)


def _skip(name, reason, parts=(), seed=None):
    return CheckOutcome(name=name, status=SKIP, metrics={}, reason=reason,
                        fingerprint=_fingerprint(name, *parts), seed=seed)


# ---------------------------------------------------------------------------
# simultaneous-rotation return sets
# ---------------------------------------------------------------------------

def kronecker_window(turns: Sequence, eps: float, N: int) -> IndexWindow:
    """``{n <= N : max_j |lambda_j^n - 1| < eps}`` for λ_j = e^(2 pi i t_j).

    Rational angles are reduced in integer arithmetic (exact zeros); float
    angles go through one reduction per n, never iterated products.
    """
    members = np.ones(N + 1, dtype=bool)
    n = np.arange(N + 1, dtype=np.int64)
    for t in turns:
        if isinstance(t, Fraction):
            resid = (n * (t.numerator % t.denominator)) % t.denominator
            frac = resid / t.denominator
        else:
            frac = np.mod(n * float(t), 1.0)
        dist = 2.0 * np.abs(np.sin(np.pi * frac))
        members &= dist < eps
    return IndexWindow(tuple(int(i) for i in np.nonzero(members)[0]), N)


def kronecker_return_check(turns: Sequence, eps: float, N: int,
                           gap_cap: Optional[int] = None,
                           probe_budget: int = 2) -> CheckOutcome:
    """Return set of a unimodular tuple: bounded gaps and never falsified.

    For all-rational tuples with eps below the smallest nonzero distance the
    window must equal exactly the multiples of the combined order.
    """
    window = kronecker_window(turns, eps, N)
    cert = syndetic_certificate(window, gap_cap=gap_cap)
    probe = ip_star_probe(window, budget=probe_budget)
    ok = cert.ok and not probe.is_falsified
    metrics = {
        "count": window.count,
        "max_gap": cert.largest_interior_gap,
        "tail_gap": cert.tail_gap,
        "density": window.count / (N + 1),
        "probe": probe.verdict,
        "certificate_k": probe.certificate_k,
    }
    exact_d = None
    if all(isinstance(t, Fraction) for t in turns):
        d = 1
        for t in turns:
            q = (t % 1).denominator
            d = d * q // math.gcd(d, q)
        min_nonzero = min((2.0 * abs(math.sin(math.pi * k / d))
                           for k in range(1, d)), default=2.0)
        if eps < min_nonzero:
            exact_d = d
            expected = tuple(range(0, N + 1, d))
            ok = ok and window.elements == expected
            metrics["exact_multiple"] = d
    witness = {"turns": [str(t) for t in turns], "eps": eps, "N": N,
               "window_head": window.elements[:8]}
    return _outcome("kronecker-return", ok, metrics, witness,
                    parts=(tuple(str(t) for t in turns), eps, N, exact_d))


# ---------------------------------------------------------------------------
# criterion-versus-simulation checks
# ---------------------------------------------------------------------------

def _basis_labels(op: Operator, dim: int, eps_grid, N: int,
                  thresholds: Thresholds, seminorms=(0,)) -> list[Label]:
    labels = []
    for k in range(1, dim + 1):
        x = SparseVector.unit(operator_space(op) if isinstance(op, Matrix)
                              else SequenceLp(2), k)
        recs = [return_set(op, x, e, seminorms, N) for e in eps_grid]
        labels.append(classify(recs, thresholds).label)
    return labels


def matrix_criterion_check(mat: Matrix, eps_grid: Sequence, N: int,
                           tolerance: float = 1e-10,
                           thresholds: Thresholds = Thresholds()) -> CheckOutcome:
    """Diagonalizable-with-unimodular-spectrum criterion versus simulation.

    The simulation side demands every basis vector classify at least
    uniformly recurrent; the two verdicts must agree.
    """
    parts = (mat.rows, tuple(map(str, eps_grid)), N, tolerance)
    try:
        eig = eigen_structure(mat, tolerance=tolerance)
    except NumericalFailure as err:
        return _skip("matrix-criterion", f"eigen failure: {err}", parts)
    criterion = eig.diagonalizable and eig.all_unimodular
    labels = _basis_labels(mat, mat.n, eps_grid, N, thresholds)
    simulated = all(lab >= Label.UNIFORMLY_RECURRENT for lab in labels)
    metrics = {
        "criterion": criterion,
        "diagonalizable": eig.diagonalizable,
        "unimodular": eig.all_unimodular,
        "eigenvalues": [f"{z:.6g}" for z in eig.eigenvalues],
        "labels": [lab.name for lab in labels],
    }
    witness = {"matrix": [[f"{z}" for z in row] for row in mat.rows]}
    return _outcome("matrix-criterion", criterion == simulated, metrics,
                    witness, parts=parts)


def diagonal_criterion_check(diag: Diagonal, sample_size: int,
                             eps_grid: Sequence, N: int,
                             tolerance: float = 1e-10,
                             thresholds: Thresholds = Thresholds()) -> CheckOutcome:
    """All-unimodular-entries criterion versus classification of finitely
    supported vectors (units and their sum)."""
    parts = (repr(diag), sample_size, tuple(map(str, eps_grid)), N)
    unimodular = True
    for k in range(1, sample_size + 1):
        lam = diag.entry(k)
        m = vabs(lam)
        if isinstance(m, Fraction):
            if m != 1:
                unimodular = False
        elif abs(float(m) - 1.0) > tolerance:
            unimodular = False
    space = operator_space(diag)
    vectors = [SparseVector.unit(space, k) for k in (1, 2, 3)]
    vectors.append(SparseVector.from_pairs(
        space, [(k, Fraction(1)) for k in (1, 2, 3)]))
    labels = []
    for x in vectors:
        recs = [return_set(diag, x, e, (0,), N) for e in eps_grid]
        labels.append(classify(recs, thresholds).label)
    simulated = all(lab >= Label.UNIFORMLY_RECURRENT for lab in labels)
    metrics = {"criterion": unimodular, "labels": [lab.name for lab in labels]}
    return _outcome("diagonal-criterion", unimodular == simulated, metrics,
                    {"rule": repr(diag)}, parts=parts)


def eigenvector_span_check(op: Operator, eigenpairs: Sequence, coefficients,
                           eps_grid: Sequence, N: int,
                           tolerance: float = 1e-9,
                           thresholds: Thresholds = Thresholds()) -> CheckOutcome:
    """Sums of unimodular eigenvectors recur uniformly, and their return
    windows contain the simultaneous-rotation window at the budgeted radius.

    The budget comes from ``T^n x - x = sum (lambda_j^n - 1) a_j v_j``: once
    every eigenvalue power is within ``eps / sum |a_j| |v_j|`` of 1, the
    orbit point is within eps of x.
    """
    parts = (repr(op), tuple(map(str, coefficients)),
             tuple(map(str, eps_grid)), N)
    space = operator_space(op)
    lams, vecs = [], []
    for lam, v in eigenpairs:
        resid = diff_seminorm(space, 0, apply(op, v),
                              v.scale(lam))
        norm_v = float(seminorm(space, 0, v))
        if float(resid) > tolerance * max(norm_v, 1.0):
            return _skip("eigenvector-span",
                         f"eigenpair residual {float(resid):.3g}", parts)
        lams.append(lam)
        vecs.append(v)
    x = vecs[0].scale(coefficients[0])
    for a, v in zip(coefficients[1:], vecs[1:]):
        x = x.add(v.scale(a))
    budgetScale = sum(abs(to_complex(a)) * float(seminorm(space, 0, v))
                      for a, v in zip(coefficients, vecs))
    turns = [_turns_of(lam) for lam in lams]
    records = [return_set(op, x, e, (0,), N) for e in eps_grid]
    verdict = classify(records, thresholds)
    contained = True
    contain_counts = []
    for rec in records:
        eps_prime = float(rec.epsilon) / budgetScale * (1 - 1e-9)
        kw = kronecker_window(turns, eps_prime, N)
        missing = [n for n in kw.elements if n not in rec.window.member_set]
        contain_counts.append((float(rec.epsilon), kw.count, len(missing)))
        if missing:
            contained = False
    ok = verdict.label >= Label.UNIFORMLY_RECURRENT and contained
    metrics = {"label": verdict.label.name, "containment": contain_counts,
               "budget_scale": budgetScale}
    return _outcome("eigenvector-span", ok, metrics,
                    {"coefficients": [str(c) for c in coefficients]}, parts=parts)


def _turns_of(lam) -> object:
    if isinstance(lam, Phase) and isinstance(lam.turns, Fraction):
        return lam.turns
    c = to_complex(lam)
    return math.atan2(c.imag, c.real) / (2 * math.pi) % 1.0


# ---------------------------------------------------------------------------
# power and scaling consistency
# ---------------------------------------------------------------------------

def power_consistency_check(op: Operator, x: Vector, p: int,
                            eps_grid: Sequence, N: int,
                            seminorms=(0,),
                            thresholds: Thresholds = Thresholds()) -> CheckOutcome:
    """Two layers: the exact window identity of taking operator powers, and
    class-level agreement of the verdicts.

    Layer one is the arithmetic identity ``(T^p)^n = T^(pn)``: the return
    window of the p-fold operator at horizon N//p must equal the p-contraction
    of the base window, element by element, at every epsilon.
    """
    parts = (repr(op), repr(x)[:80], p, tuple(map(str, eps_grid)), N)
    pop = Power(op, p)
    identity_ok = True
    mismatch = None
    recs_t, recs_tp = [], []
    for e in eps_grid:
        rt = return_set(op, x, e, seminorms, N)
        rtp = return_set(pop, x, e, seminorms, N // p)
        recs_t.append(rt)
        recs_tp.append(rtp)
        expected = contract(rt.window, p)
        if rtp.window.elements != expected.elements:
            identity_ok = False
            got, want = set(rtp.window.elements), set(expected.elements)
            mismatch = {"eps": str(e),
                        "extra": sorted(got - want)[:5],
                        "missing": sorted(want - got)[:5]}
            break
    label_t = classify(recs_t, thresholds).label
    label_tp = classify(recs_tp, thresholds).label
    labels_ok = label_t == label_tp
    metrics = {"identity": identity_ok, "label_T": label_t.name,
               "label_Tp": label_tp.name, "p": p}
    return _outcome("power-consistency", identity_ok and labels_ok, metrics,
                    mismatch or {"labels": (label_t.name, label_tp.name)},
                    parts=parts)


def scaling_consistency_check(op: Operator, x: Vector, factor,
                              eps_grid: Sequence, N: int,
                              seminorms=(0,),
                              thresholds: Thresholds = Thresholds()) -> CheckOutcome:
    """Class-level agreement of x under T and under a unimodular multiple.

    Exact periods may differ legitimately (a root-of-unity factor changes the
    period, an irrational one dissolves it into uniform recurrence), so the
    comparison accepts equality or both sides at least uniformly recurrent.
    """
    parts = (repr(op), repr(x)[:80], str(factor), tuple(map(str, eps_grid)), N)
    m = vabs(factor)
    if not (isinstance(m, Fraction) and m == 1) and abs(float(m) - 1.0) > 1e-12:
        return _skip("scaling-consistency", "factor is not unimodular", parts)
    recs_t = [return_set(op, x, e, seminorms, N) for e in eps_grid]
    recs_s = [return_set(Scaled(op, factor), x, e, seminorms, N)
              for e in eps_grid]
    lab_t = classify(recs_t, thresholds).label
    lab_s = classify(recs_s, thresholds).label
    ok = (lab_t == lab_s) or (lab_t >= Label.UNIFORMLY_RECURRENT
                              and lab_s >= Label.UNIFORMLY_RECURRENT)
    metrics = {"label_T": lab_t.name, "label_scaled": lab_s.name}
    return _outcome("scaling-consistency", ok, metrics,
                    {"factor": str(factor)}, parts=parts)


# ---------------------------------------------------------------------------
# weighted shift series
# ---------------------------------------------------------------------------

def shift_series_check(weights: Rule, support: IndexWindow,
                       divergence_threshold: float = 10.0,
                       tail_tol: float = 1e-9) -> CheckOutcome:
    """Dichotomy of ``sum over A of 1/(w_1 ... w_n)`` in log-safe arithmetic.

    Diverging: partial sums cross the threshold inside the horizon.
    Converging: the last-half increment is below the tail tolerance; then the
    truncated vector ``x_A`` is built exactly (for exact weight rules) and,
    when A is the full index range, the backward-shift fixed-point residual
    must sit below the certified extrapolated tail.
    """
    parts = (weights.source, support.horizon, support.count,
             divergence_threshold)
    if not support.count or support.elements[0] < 1:
        return _skip("shift-series", "support must lie in [1, H]", parts)
    top = support.elements[-1]
    log2w = np.zeros(top + 1)
    for nu in range(1, top + 1):
        w = weights(nu)
        if w == 0:
            return _skip("shift-series", f"weight w_{nu} vanishes", parts)
        log2w[nu] = math.log2(abs(float(w)))
    cumlog = np.cumsum(log2w)
    idx = np.fromiter(support.elements, dtype=np.int64)
    terms = np.power(2.0, np.clip(-cumlog[idx], -1020, 1020))
    sums = np.cumsum(terms)
    crossing = None
    over = np.nonzero(sums > divergence_threshold)[0]
    if over.size:
        crossing = int(idx[over[0]])
    half = len(terms) // 2
    tail_increment = float(sums[-1] - sums[half - 1]) if half >= 1 else float(sums[-1])
    metrics = {
        "partial_sum": float(sums[-1]),
        "tail_increment": tail_increment,
        "crossing_n": crossing,
        "terms": len(terms),
        "curve": [(int(idx[i]), float(sums[i]))
                  for i in range(0, len(terms), max(1, len(terms) // 32))],
    }
    if crossing is not None:
        metrics["verdict"] = "diverging"
        return _outcome("shift-series", True, metrics, parts=parts)
    if tail_increment >= tail_tol:
        metrics["verdict"] = "undecided"
        return _outcome("shift-series", False, metrics,
                        {"reason": "neither crossing nor Cauchy tail"}, parts=parts)
    metrics["verdict"] = "converging"
    ratios = terms[1:] / terms[:-1]
    r = float(np.max(ratios[-max(1, len(ratios) // 4):])) if ratios.size else 0.0
    r = min(r, 0.999)
    certified_tail = float(terms[-1]) * (r / (1.0 - r) if r > 0 else 1.0)
    certified_tail = max(certified_tail, float(terms[-1]))
    metrics["certified_tail"] = certified_tail
    # exact truncated vector and its fixed-point residual
    exact_ok = weights.is_exact
    space = SequenceLp(2)
    pairs = []
    prod = Fraction(1)
    cursor = support.member_set
    for nu in range(1, top + 1):
        w = weights(nu)
        if exact_ok:
            prod *= Fraction(w)
        if nu in cursor:
            if exact_ok:
                pairs.append((nu, 1 / prod))
            else:
                pairs.append((nu, 2.0 ** float(-cumlog[nu])))
    x = SparseVector.from_pairs(space, pairs)
    shift = WeightedBackwardShift(weights)
    residual = float(diff_seminorm(space, 0, apply(shift, x), x))
    metrics["fixed_point_residual"] = residual
    full_range = support.elements == tuple(range(1, top + 1))
    ok = True
    if full_range:
        ok = residual <= certified_tail * (1 + 1e-12)
    return _outcome("shift-series", ok, metrics,
                    {"residual": residual, "tail": certified_tail}, parts=parts)


# ---------------------------------------------------------------------------
# cut-shift-paste closure
# ---------------------------------------------------------------------------

_FAMILIES = ("infinite", "syndetic", "lower-density", "upper-density",
             "banach-density")


def _sample_member(family: str, rng: np.random.Generator,
                   horizon: int) -> IndexWindow:
    if family == "syndetic":
        g = int(rng.integers(2, 40))
        gaps = rng.integers(1, g + 1, size=2 * horizon // g + 4)
        elems = np.cumsum(gaps)
        return IndexWindow.from_iterable(
            [0, *elems[elems <= horizon].tolist()], horizon)
    if family == "lower-density":
        delta = float(rng.uniform(0.3, 0.6))
        mask = rng.random(horizon + 1) < delta
        mask[0] = True
        return IndexWindow.from_iterable(np.nonzero(mask)[0].tolist(), horizon)
    if family == "upper-density":
        delta = float(rng.uniform(0.4, 0.7))
        mask = rng.random(horizon + 1) < delta / 8
        head = rng.random(horizon // 3 + 1) < delta
        mask[: horizon // 3 + 1] |= head
        mask[0] = True
        mask[-1] = True
        return IndexWindow.from_iterable(np.nonzero(mask)[0].tolist(), horizon)
    if family == "banach-density":
        delta = float(rng.uniform(0.3, 0.6))
        mask = np.zeros(horizon + 1, dtype=bool)
        block = max(1, int(horizon ** 0.75)) + int(rng.integers(0, horizon // 8))
        starts = rng.choice(max(1, horizon - block), size=3, replace=False)
        for s in starts:
            seg = rng.random(block) < delta
            mask[s: s + block] |= seg
        mask[0] = True
        mask[-1] = True
        return IndexWindow.from_iterable(np.nonzero(mask)[0].tolist(), horizon)
    # infinite: sparse but horizon-spanning
    step = int(rng.integers(20, 120))
    jitter = rng.integers(0, step, size=horizon // step + 2)
    elems = [0] + [min(horizon, i * step + int(j))
                   for i, j in enumerate(jitter)]
    return IndexWindow.from_iterable(elems + [horizon], horizon)


def _sample_instance(rng: np.random.Generator, horizon: int,
                     max_shift: int = 50) -> CutShiftPaste:
    q = int(rng.integers(1, 5))
    style = rng.integers(0, 2)
    if style == 0 or q == 1:
        pieces = tuple(SetPredicate.residue_class(q, r) for r in range(q))
    else:
        cuts = sorted(int(c) for c in rng.integers(1, horizon, size=q - 1))
        bounds = [0, *cuts, horizon]
        pieces = tuple(SetPredicate.intervals((bounds[i], bounds[i + 1]))
                       for i in range(q))
    shifts = tuple(int(s) for s in rng.integers(0, max_shift + 1, size=q))
    return CutShiftPaste(pieces, shifts)


def cut_shift_paste_check(family: str, trials: int, seed: int,
                          horizon: int = 20_000,
                          slack: float = 0.02) -> CheckOutcome:
    """Randomized closure check of one family under cut-shift-paste.

    Violations counted: a syndetic member whose image has an interior gap
    above ``g + max_shift``; a density member whose image estimate drops
    below ``pre/(2q) - slack``; an infinite member whose image loses the
    horizon-spanning evidence.  The identity instance (q=1, shift 0) is
    verified to reproduce the input exactly on every trial.
    """
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    rng = np.random.default_rng(seed)
    violations = 0
    witness = None
    margins = []
    for trial in range(trials):
        a = _sample_member(family, rng, horizon)
        inst = _sample_instance(rng, horizon)
        out = cut_shift_paste(a, inst)
        ident = cut_shift_paste(a, CutShiftPaste((SetPredicate.everything(),), (0,)))
        if ident.elements != a.elements:
            violations += 1
            witness = {"trial": trial, "kind": "identity"}
            continue
        bad, margin = _csp_violation(family, a, out, inst, slack)
        margins.append(margin)
        if bad:
            violations += 1
            if witness is None:
                witness = {"trial": trial, "kind": "closure", "q": inst.q,
                           "shifts": inst.shifts, "margin": margin}
    metrics = {"trials": trials, "violations": violations,
               "min_margin": min(margins) if margins else None}
    return _outcome(f"cut-shift-paste[{family}]", violations == 0, metrics,
                    witness, seed=seed, parts=(family, trials, seed, horizon))


def _csp_violation(family: str, a: IndexWindow, out: IndexWindow,
                   inst: CutShiftPaste, slack: float):
    q, s = inst.q, inst.max_shift
    if family == "syndetic":
        pre = syndetic_certificate(a)
        g = pre.largest_interior_gap or 0
        lo, hi = a.elements[0] + s, a.elements[-1]
        interior = [e for e in out.elements if lo <= e <= hi]
        worst = 0
        for u, v in zip(interior, interior[1:]):
            worst = max(worst, v - u)
        margin = (g + s) - worst
        return worst > g + s, margin
    if family == "infinite":
        ok_count = out.count >= a.count / q
        ev = window_evidence(out, Fraction(0), Thresholds())
        margin = out.count - a.count / q
        return not (ok_count and ev.recurrent), margin
    pre = density_report(a)
    post = density_report(out)
    key = {"lower-density": "lower_est", "upper-density": "upper_est",
           "banach-density": "banach_upper_est"}[family]
    pre_v, post_v = getattr(pre, key), getattr(post, key)
    floor = pre_v / (2 * q) - slack
    return post_v < floor, post_v - floor


# ---------------------------------------------------------------------------
# separation of uniformly recurrent orbits from periodic points
# ---------------------------------------------------------------------------

def minimality_separation_check(op: Operator, x: Vector, y: Vector, N: int,
                                seminorm_index: int = 0,
                                floor: float = 1e-9) -> CheckOutcome:
    """The orbit of a (uniformly recurrent) vector never accumulates on a
    periodic orbit it does not already live on: the sampled distance floor
    must stay strictly positive."""
    parts = (repr(op), repr(x)[:60], repr(y)[:60], N)
    period = exact_state_period(op, y)
    if period is None:
        return _skip("minimality-separation", "reference point is not exactly periodic",
                     parts)
    orbit = [y]
    for _ in range(period - 1):
        orbit.append(apply(op, orbit[-1]))
    from .operators import state_exact_eq
    if any(state_exact_eq(x, z) for z in orbit):
        return _skip("minimality-separation", "x lies on the periodic orbit", parts)
    space = x.space
    best = math.inf
    arg = None
    for n in growth_schedule(N):
        z = power_apply(op, x, n)
        for r, w in enumerate(orbit):
            d = float(diff_seminorm(space, seminorm_index, z, w))
            if d < best:
                best, arg = d, (n, r)
    metrics = {"floor": best, "argmin": arg, "period": period}
    return _outcome("minimality-separation", best > floor, metrics,
                    {"floor": best}, parts=parts)


# ---------------------------------------------------------------------------
# translation invariance of the density estimates
# ---------------------------------------------------------------------------

def translation_invariance_check(window: IndexWindow, m: int) -> CheckOutcome:
    """Shifting a window by m preserves its Banach-type window estimate
    exactly and its upper estimate up to the derived boundary slack.

    This is the set-arithmetic step that lets a return set inherited through
    ``N(x,V) + m`` keep its density class.
    """
    parts = (window.horizon, window.count, m)
    if window.horizon < 10 or window.count == 0:
        return _skip("translation-invariance", "degenerate window", parts)
    pre = density_report(window)
    shifted = window.translate(m)
    post = density_report(shifted, burn_in=pre.burn_in + m,
                          schedule=pre.schedule)
    raw_equal = post.banach_raw == pre.banach_raw
    slack = pre.upper_est * m / (pre.burn_in + m + 1) + 1e-12
    upper_ok = (post.upper_est <= pre.upper_est + 1e-15
                and post.upper_est >= pre.upper_est - slack)
    metrics = {
        "banach_pre": pre.banach_raw, "banach_post": post.banach_raw,
        "upper_pre": pre.upper_est, "upper_post": post.upper_est,
        "slack": slack,
    }
    return _outcome("translation-invariance", raw_equal and upper_ok, metrics,
                    {"m": m}, parts=parts)
