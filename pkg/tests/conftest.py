import math

import numpy as np
import pytest

from recurlab import Matrix, SparseVector


def rotation_matrix(theta: float) -> Matrix:
    c, s = math.cos(theta), math.sin(theta)
    return Matrix.from_array([[c, -s], [s, c]])


def unit(space, k: int) -> SparseVector:
    return SparseVector.unit(space, k)


def conjugated_unimodular(turns, seed: int) -> Matrix:
    """S diag(e^(2 pi i t_j)) S^-1 with a well-conditioned random S."""
    rng = np.random.default_rng(seed)
    n = len(turns)
    while True:
        S = rng.integers(-2, 3, size=(n, n)).astype(np.complex128)
        S += np.eye(n) * 3
        if np.linalg.cond(S) < 50:
            break
    D = np.diag([np.exp(2j * np.pi * float(t)) for t in turns])
    return Matrix.from_array(S @ D @ np.linalg.inv(S))


# ---------------------------------------------------------------------------
# independent density oracles (sorted-array recounts, no cumulative sums)
# ---------------------------------------------------------------------------

def oracle_running_extrema(elements, horizon, burn_in):
    els = np.fromiter(elements, dtype=np.int64) if elements else np.zeros(0, np.int64)
    ns = np.arange(burn_in, horizon + 1, dtype=np.int64)
    counts = np.searchsorted(els, ns, side="right")
    dens = counts / (ns + 1)
    return float(dens.min()), float(dens.max())


def oracle_window_max(elements, horizon, length):
    els = np.fromiter(elements, dtype=np.int64) if elements else np.zeros(0, np.int64)
    starts = np.arange(0, horizon - length + 1, dtype=np.int64)
    hi = np.searchsorted(els, starts + length, side="right")
    lo = np.searchsorted(els, starts, side="left")
    return float((hi - lo).max() / (length + 1))


def oracle_window_max_bisect(elements, horizon, length, starts):
    """Pure-python recount on selected window starts."""
    from bisect import bisect_left, bisect_right
    els = list(elements)
    best = 0
    for m in starts:
        if m + length > horizon:
            continue
        c = bisect_right(els, m + length) - bisect_left(els, m)
        best = max(best, c)
    return best / (length + 1)


def random_structured_window(rng, horizon):
    from recurlab import IndexWindow
    kind = rng.integers(0, 4)
    if kind == 0:
        p = int(rng.integers(2, 60))
        return IndexWindow.residue(p, int(rng.integers(0, p)), horizon)
    if kind == 1:
        mask = rng.random(horizon + 1) < rng.uniform(0.005, 0.6)
        mask[0] = True
        return IndexWindow.from_iterable(np.nonzero(mask)[0].tolist(), horizon)
    if kind == 2:
        gaps = rng.integers(1, int(rng.integers(2, 80)), size=horizon)
        elems = np.cumsum(gaps)
        return IndexWindow.from_iterable([0, *elems[elems <= horizon]], horizon)
    cut = int(rng.integers(horizon // 10, horizon // 2))
    return IndexWindow.from_iterable(range(cut), horizon)


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)
