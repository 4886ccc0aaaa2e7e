"""Last-passage dynamic programming with multi-point extraction.

G(x, y) = max over up-right paths (0,0) -> (x,y) of the path weight sum,
computed with rolling-row storage.  Two sweep implementations:

  * serial: plain Python recursion G = w + max(left, below).  Every DP value
    equals the sequentially-rounded sum along some path, which makes it
    bit-exact against the enumeration oracle (float addition is commutative
    and rounding is monotone, so the max survives each +w step).
  * scan: per-row cumsum + running max (and batched across samples), used
    for Monte Carlo scale.  Agrees with serial up to a few ulps only, since
    the path sums are re-associated.

Small grids dispatch to serial so the exactness contract holds where the
enumeration oracle can reach.  Ties in the max would break toward the
horizontal predecessor; with continuous weights they almost surely never
occur and DP values are unaffected either way.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DomainError, RefusalError
from .weights import BatchWeights, ModelParams, WeightOracle

SERIAL_CELL_CAP = 20_000
BRUTE_FORCE_CAP = 22  # x + y; C(22,11) ~ 7e5 paths

Point = Tuple[int, int]


def _check_points(points: Sequence[Point]) -> List[Point]:
    if not points:
        raise RefusalError("point set is empty")
    seen = []
    for p in points:
        x, y = int(p[0]), int(p[1])
        if x < 0 or y < 0:
            raise DomainError(f"point {p} outside the first quadrant")
        if (x, y) not in seen:
            seen.append((x, y))
    return seen


@dataclass
class PassageResult:
    values: Dict[Point, float]
    sample_index: int


def _sweep_serial(oracle: WeightOracle, points: List[Point]) -> Dict[Point, float]:
    xmax = max(p[0] for p in points)
    ymax = max(p[1] for p in points)
    by_row: Dict[int, List[int]] = {}
    for x, y in points:
        by_row.setdefault(y, []).append(x)
    out: Dict[Point, float] = {}
    row = None
    for j in range(ymax + 1):
        w = oracle.row_weights(j, xmax)
        if j == 0:
            g = [0.0] * (xmax + 1)
            g[0] = w[0]
            for i in range(1, xmax + 1):
                g[i] = g[i - 1] + w[i]
        else:
            g = row
            g[0] = g[0] + w[0]
            for i in range(1, xmax + 1):
                below = g[i]
                left = g[i - 1]
                g[i] = w[i] + (left if left > below else below)
        row = g
        for x in by_row.get(j, ()):
            out[(x, j)] = g[x]
    return out


def _scan_row(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    """One row of the max-plus recursion, vectorized along the row.

    G_new[i] = S[i] + max_{k<=i}(G_old[k] - S[k-1]) with S the row cumsum;
    the max over the entry column k replaces the left/below recursion.
    Works on (n,) or batched (B, n) arrays (axis=-1).
    """
    s = np.cumsum(w, axis=-1)
    a = g.copy()
    a[..., 1:] -= s[..., :-1]
    np.maximum.accumulate(a, axis=-1, out=a)
    return s + a


def _sweep_scan(oracle: WeightOracle, points: List[Point]) -> Dict[Point, float]:
    xmax = max(p[0] for p in points)
    ymax = max(p[1] for p in points)
    by_row: Dict[int, List[int]] = {}
    for x, y in points:
        by_row.setdefault(y, []).append(x)
    out: Dict[Point, float] = {}
    g = np.cumsum(oracle.row_weights(0, xmax))
    for x in by_row.get(0, ()):
        out[(x, 0)] = float(g[x])
    for j in range(1, ymax + 1):
        g = _scan_row(g, oracle.row_weights(j, xmax))
        for x in by_row.get(j, ()):
            out[(x, j)] = float(g[x])
    return out


def last_passage(oracle: WeightOracle, points: Sequence[Point]) -> PassageResult:
    """Passage times to every requested point, captured in one sweep."""
    pts = _check_points(points)
    xmax = max(p[0] for p in pts)
    ymax = max(p[1] for p in pts)
    if (xmax + 1) * (ymax + 1) <= SERIAL_CELL_CAP:
        vals = _sweep_serial(oracle, pts)
    else:
        vals = _sweep_scan(oracle, pts)
    return PassageResult(values=vals, sample_index=oracle.seed.sample_index)


def last_passage_batch(
    params: ModelParams,
    master_seed: int,
    sample_indices,
    points: Sequence[Point],
) -> np.ndarray:
    """G at the requested points for a batch of samples.

    Returns shape (n_samples, n_points), column order following `points`.
    """
    pts = _check_points(points)
    order = {p: k for k, p in enumerate(pts)}
    cols = [order[(int(p[0]), int(p[1]))] for p in points]
    xmax = max(p[0] for p in pts)
    ymax = max(p[1] for p in pts)
    by_row: Dict[int, List[int]] = {}
    for x, y in pts:
        by_row.setdefault(y, []).append(x)
    bw = BatchWeights(params, master_seed, sample_indices)
    out = np.empty((len(bw.keys), len(pts)))
    g = np.cumsum(bw.row(0, xmax), axis=-1)
    for x in by_row.get(0, ()):
        out[:, order[(x, 0)]] = g[:, x]
    for j in range(1, ymax + 1):
        g = _scan_row(g, bw.row(j, xmax))
        for x in by_row.get(j, ()):
            out[:, order[(x, j)]] = g[:, x]
    return out[:, cols] if cols != list(range(len(pts))) else out


def last_passage_point_to_point(
    oracle: WeightOracle, frm: Point, to: Point
) -> float:
    """Max path weight over up-right paths constrained to start at `frm`."""
    fx, fy = int(frm[0]), int(frm[1])
    tx, ty = int(to[0]), int(to[1])
    if fx < 0 or fy < 0:
        raise DomainError(f"start point {frm} outside the first quadrant")
    if fx > tx or fy > ty:
        raise DomainError(f"start {frm} not componentwise <= end {to}")
    g = None
    for j in range(fy, ty + 1):
        w = oracle.row_weights(j, tx)
        if j == fy:
            g = [0.0] * (tx + 1)
            g[fx] = w[fx]
            for i in range(fx + 1, tx + 1):
                g[i] = g[i - 1] + w[i]
        else:
            g[fx] = g[fx] + w[fx]
            for i in range(fx + 1, tx + 1):
                below = g[i]
                left = g[i - 1]
                g[i] = w[i] + (left if left > below else below)
    return g[tx]


def brute_force_last_passage(oracle: WeightOracle, point: Point) -> float:
    """Exact max over explicitly enumerated up-right paths (testing oracle).

    Path sums are accumulated step by step in path order, matching the
    serial DP's rounding exactly.
    """
    x, y = int(point[0]), int(point[1])
    if x < 0 or y < 0:
        raise DomainError(f"point {point} outside the first quadrant")
    if x + y > BRUTE_FORCE_CAP:
        raise RefusalError(
            f"x + y = {x + y} exceeds enumeration cap {BRUTE_FORCE_CAP}"
        )
    steps = x + y
    w = np.empty((y + 1, x + 1))
    for j in range(y + 1):
        w[j] = oracle.row_weights(j, x)
    if steps == 0:
        return float(w[0, 0])
    up_sets = list(combinations(range(steps), y))
    npaths = len(up_sets)
    is_up = np.zeros((npaths, steps), dtype=bool)
    for r, ups in enumerate(up_sets):
        is_up[r, list(ups)] = True
    rows = np.zeros(npaths, dtype=np.intp)
    cols = np.zeros(npaths, dtype=np.intp)
    acc = np.full(npaths, w[0, 0])
    for s in range(steps):
        rows = rows + is_up[:, s]
        cols = cols + (~is_up[:, s])
        acc = acc + w[rows, cols]
    return float(np.max(acc))
