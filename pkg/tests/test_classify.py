import math
from fractions import Fraction

import pytest

from recurlab import (BlockCycle, Diagonal, FiniteDim, IndexWindow, Label,
                      Matrix, RowRotation, RowState, Rule, SequenceLp,
                      SparseVector, Thresholds, blockcycle_rrec_refutation,
                      classify, f_recurrence_check, named_families, return_set)

from conftest import rotation_matrix

L2 = SequenceLp(2)


def verdict_of(op, x, grid, n, seminorms=(0,), th=Thresholds()):
    recs = [return_set(op, x, e, seminorms, n) for e in grid]
    return classify(recs, th), recs


GRID = [Fraction(1, 2), Fraction(1, 10)]


def assert_chain(verdict):
    """The hierarchy implications must hold on the emitted evidence."""
    for ev in verdict.evidence:
        if ev.ip_star:
            assert ev.uniform
        if ev.uniform:
            assert ev.recurrent
        if ev.frequent:
            assert ev.upper_frequent
        if ev.upper_frequent:
            assert ev.reiterative
        if ev.reiterative:
            assert ev.recurrent
    if verdict.label == Label.PERIODIC:
        assert all(ev.ip_star and ev.full_ap is not None
                   for ev in verdict.evidence)


class TestClassify:
    def test_blockcycle_periodic(self):
        v, _ = verdict_of(BlockCycle(), SparseVector.unit(L2, 5), GRID, 10_000)
        assert v.label == Label.PERIODIC and v.period == 4
        assert_chain(v)

    def test_rowrotation_dual_family_certificate(self):
        grid = [Fraction(3, 32), Fraction(3, 512)]
        v, _ = verdict_of(RowRotation(), RowState(0), grid, 40 * 256, (1,))
        assert v.label == Label.IP_STAR_CERTIFIED
        assert all(ev.uniform and ev.ip_star for ev in v.evidence)
        assert v.periodic_like == 256
        assert_chain(v)

    def test_jordan_none(self):
        v, _ = verdict_of(Matrix.from_array([[1, 1], [0, 1]]),
                          SparseVector.from_pairs(FiniteDim(2), [(2, Fraction(1))]),
                          GRID, 10_000)
        assert v.label == Label.NONE

    def test_float_rotation_reports_periodic_like(self):
        v, _ = verdict_of(rotation_matrix(2 * math.pi / 7),
                          SparseVector.unit(FiniteDim(2), 1),
                          [Fraction(1, 2), Fraction(1, 5)], 10_000)
        # floats never claim exact periodicity; the progression is recorded
        assert v.label == Label.IP_STAR_CERTIFIED
        assert v.period is None and v.periodic_like == 7

    def test_grid_permutation_invariance(self):
        op, x = BlockCycle(), SparseVector.unit(L2, 5)
        recs = [return_set(op, x, e, (0,), 2000) for e in GRID]
        assert classify(recs).label == classify(list(reversed(recs))).label

    def test_label_monotone_in_thresholds(self):
        op = Diagonal(turns=Rule("sqrt(2)*n"))
        x = SparseVector.from_pairs(L2, [(1, Fraction(1)), (2, Fraction(1))])
        recs = [return_set(op, x, e, (0,), 50_000) for e in GRID]
        weak = classify(recs, Thresholds())
        strong = classify(recs, Thresholds(delta_low=0.2, delta_up=0.2,
                                           delta_bd=0.2, m_min=60))
        assert strong.label <= weak.label

    def test_inconsistent_records_rejected(self):
        op, x = BlockCycle(), SparseVector.unit(L2, 5)
        a = return_set(op, x, Fraction(1, 2), (0,), 100)
        b = return_set(op, x, Fraction(1, 4), (0,), 200)
        with pytest.raises(ValueError):
            classify([a, b])
        with pytest.raises(ValueError):
            classify([a, a])
        with pytest.raises(ValueError):
            classify([])

    def test_chain_across_zoo(self):
        cases = [
            (BlockCycle(), SparseVector.unit(L2, 5), (0,)),
            (rotation_matrix(2 * math.pi * math.sqrt(2)),
             SparseVector.unit(FiniteDim(2), 1), (0,)),
            (Diagonal(turns=Rule("1/2^n")),
             SparseVector.from_pairs(L2, [(k, Fraction(1)) for k in (1, 2)]), (0,)),
            (Diagonal(values=Rule("2")), SparseVector.unit(L2, 1), (0,)),
            (Matrix.from_array([[1, 1], [0, 1]]),
             SparseVector.from_pairs(FiniteDim(2), [(2, Fraction(1))]), (0,)),
        ]
        for op, x, sem in cases:
            v, _ = verdict_of(op, x, GRID, 5000, sem)
            assert_chain(v)


class TestFamilies:
    def test_syndetic_family_on_rowrotation(self):
        grid = [Fraction(3, 32), Fraction(3, 512)]
        _, recs = verdict_of(RowRotation(), RowState(0), grid, 40 * 256, (1,))
        ok, rows = f_recurrence_check(recs, named_families()["syndetic"])
        assert ok and all(flag for _, flag in rows)

    def test_square_pattern_lacks_density(self):
        w = IndexWindow.from_iterable((n * n for n in range(200)), 20_000)
        fam = named_families()["lower-density"]
        assert not fam(w, Thresholds())

    def test_infinite_on_periodic_verdict(self):
        _, recs = verdict_of(BlockCycle(), SparseVector.unit(L2, 5), GRID, 10_000)
        ok, _ = f_recurrence_check(recs, named_families()["infinite"])
        assert ok

    def test_families_match_classifier_sub_verdicts(self):
        cases = [
            (BlockCycle(), SparseVector.unit(L2, 5), (0,)),
            (Diagonal(turns=Rule("sqrt(2)*n")),
             SparseVector.from_pairs(L2, [(1, Fraction(1))]), (0,)),
        ]
        wiring = {
            "infinite": "recurrent", "syndetic": "uniform",
            "lower-density": "frequent", "upper-density": "upper_frequent",
            "banach-density": "reiterative",
        }
        for op, x, sem in cases:
            v, recs = verdict_of(op, x, GRID, 20_000, sem)
            for name, attr in wiring.items():
                ok, _ = f_recurrence_check(recs, named_families()[name])
                assert ok == all(getattr(ev, attr) for ev in v.evidence)

    def test_upward_closure(self, rng):
        families = named_families()
        th = Thresholds()
        for _ in range(60):
            h = 4000
            p = int(rng.integers(2, 40))
            base = IndexWindow.residue(p, 0, h)
            extra = rng.integers(0, h + 1, size=int(rng.integers(1, 200)))
            bigger = IndexWindow.from_iterable(
                list(base.elements) + extra.tolist(), h)
            for fam in families.values():
                if fam(base, th):
                    assert fam(bigger, th), fam.name


class TestRefutation:
    def vector(self, jmax=20):
        return SparseVector.from_pairs(
            L2, [(1 << j, Fraction(2, j)) for j in range(1, jmax + 1)])

    def test_example_block_eight(self):
        cert = blockcycle_rrec_refutation(self.vector(), Fraction(1, 10))
        assert cert is not None
        assert cert.j == 8
        assert cert.window_length == 256
        assert cert.max_returns_per_window == 8
        assert cert.density_bound == Fraction(8, 256)
        assert cert.density_bound < Fraction(1, 10) / 2
        assert cert.coordinate_floor > 2 * cert.epsilon

    def test_certificate_against_actual_windows(self):
        # direct cross-check: every full block-length stretch of the actual
        # return window at the certified radius holds at most j returns
        x = self.vector(12)
        cert = blockcycle_rrec_refutation(x, Fraction(1, 10))
        rec = return_set(BlockCycle(), x, cert.epsilon, (0,), 6000)
        block = cert.window_length
        members = rec.window.member_set
        for start in range(0, 6000 - block, 97):
            count = sum(1 for n in range(start, start + block) if n in members)
            assert count <= cert.max_returns_per_window

    def test_inapplicable_cases(self):
        assert blockcycle_rrec_refutation(
            SparseVector.unit(L2, 5), Fraction(1, 10)) is None
        assert blockcycle_rrec_refutation(
            SparseVector.from_pairs(L2, []), Fraction(1, 10)) is None
