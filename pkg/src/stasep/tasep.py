"""Event-driven TASEP with particle, height, and tandem-queue observables,
plus the exact pathwise bridge to last-passage percolation.

Conventions (right-to-left labels): label 0 sits at the smallest occupied
non-negative site at t=0; labels increase to the left, so positions are
strictly decreasing in the label.  Omega(i, j) is the Exp(1) clock of the
jump taking particle j from site i-j-1 to i-j, armed at the instant both
the particle sits at i-j-1 and site i-j is empty.

The jump times then satisfy T(i,j) = Omega(i,j) + max(T(i-1,j), T(i,j-1))
with T = 0 outside the domain {i - j > x_j(0)}, which is a last-passage
recursion over a staircase domain; the simulator and the DP compute the
same max/add float operations, so the bridge comparisons are bit-exact.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ParameterError, RefusalError, WindowError
from .rng import TAG_INIT, TAG_OMEGA, SeedSpec, exp_from_uniform, uniform_oc

_OFF = 1 << 20  # recenters signed lattice/site indices into counter range


class WaitingTimes:
    """Counter-backed iid Exp(1) jump clocks Omega(i, j)."""

    def __init__(self, seed: SeedSpec):
        self.seed = seed
        self._key = seed.key

    def omega(self, i: int, j: int) -> float:
        u = uniform_oc(self._key, TAG_OMEGA, i + _OFF, j + _OFF)
        return float(exp_from_uniform(u, 1.0))

    def omega_row(self, j: int, i_lo: int, i_hi: int) -> np.ndarray:
        idx = np.arange(i_lo + _OFF, i_hi + 1 + _OFF)
        return exp_from_uniform(uniform_oc(self._key, TAG_OMEGA, idx, j + _OFF), 1.0)


def bernoulli_occupation(seed: SeedSpec, lo: int, hi: int, rho: float) -> np.ndarray:
    """iid Bernoulli(rho) occupation variables for sites lo..hi."""
    if not 0.0 < rho < 1.0:
        raise ParameterError(f"rho must be in (0,1), got {rho}")
    sites = np.arange(lo + _OFF, hi + 1 + _OFF)
    return uniform_oc(seed.key, TAG_INIT, sites, 0) < rho


@dataclass
class TasepState:
    label_min: int
    positions: np.ndarray  # positions[k] = site of particle label_min + k
    time: float
    n_current: int  # jumps across bond 0 -> 1 so far
    window: Tuple[int, int]

    def __post_init__(self):
        if np.any(np.diff(self.positions) >= 0):
            raise ParameterError("positions must be strictly decreasing in the label")

    @property
    def labels(self) -> np.ndarray:
        return self.label_min + np.arange(len(self.positions))

    def position_of(self, label: int) -> int:
        return int(self.positions[label - self.label_min])

    def occupation(self, lo: int, hi: int) -> np.ndarray:
        occ = np.zeros(hi - lo + 1, dtype=np.int8)
        pos = self.positions
        inside = (pos >= lo) & (pos <= hi)
        occ[pos[inside] - lo] = 1
        return occ

    def height(self, lo: int, hi: int) -> np.ndarray:
        """h_t(j) for j in lo..hi, anchored at h_t(0) = 2 N_t; slopes are
        +1 over empty sites and -1 over occupied ones."""
        full_lo, full_hi = min(lo, 0), max(hi, 0)
        occ = self.occupation(full_lo, full_hi).astype(np.int64)
        step = 1 - 2 * occ
        h = np.zeros(full_hi - full_lo + 2, dtype=np.int64)  # h[k] at site full_lo-1+k
        zero_idx = 0 - (full_lo - 1)
        h[zero_idx:] = np.concatenate(([0], np.cumsum(step[zero_idx:])))
        h[:zero_idx] = -np.cumsum(step[:zero_idx][::-1])[::-1]
        h += 2 * self.n_current
        return h[(lo - (full_lo - 1)) : (hi - (full_lo - 1)) + 1]


@dataclass
class JumpLog:
    times: List[float] = field(default_factory=list)
    labels: List[int] = field(default_factory=list)
    targets: List[int] = field(default_factory=list)

    def crossing_times(self, label: int) -> np.ndarray:
        lt = np.asarray(self.labels)
        t = np.asarray(self.times)
        return np.sort(t[lt == label])

    def jump_time(self, i: int, j: int) -> Optional[float]:
        """Time of the jump with clock index (i, j), i.e. particle j into
        site i - j; None if it has not occurred."""
        for t, lab, tgt in zip(self.times, self.labels, self.targets):
            if lab == j and tgt == i - j:
                return t
        return None


def stationary_window(obs_lo: int, obs_hi: int, t_end: float) -> Tuple[int, int]:
    """Fill window guaranteeing exact observations on [obs_lo, obs_hi] up to
    t_end: information moves at rate <= 1, so the margin carries the ballistic
    term plus a 10*sqrt(t) fluctuation allowance (never below 50)."""
    margin = int(math.ceil(t_end + max(10.0 * math.sqrt(max(t_end, 0.0)), 50.0)))
    return obs_lo - margin, obs_hi + margin


def init_stationary(rho: float, window: Tuple[int, int], seed: SeedSpec) -> TasepState:
    """Bernoulli(rho) product initial data on the window, labelled by the
    right-to-left convention."""
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ParameterError("empty window")
    occ = bernoulli_occupation(seed, lo, hi, rho)
    sites = np.arange(lo, hi + 1)[occ]
    if len(sites) == 0:
        raise RefusalError("no particles in window; enlarge it or raise rho")
    nonneg = sites[sites >= 0]
    if len(nonneg) == 0:
        label_of_rightmost = 1  # all particles on negative sites
    else:
        label_of_rightmost = -(len(nonneg) - 1)
    positions = sites[::-1].astype(np.int64)  # decreasing
    return TasepState(
        label_min=label_of_rightmost,
        positions=positions,
        time=0.0,
        n_current=0,
        window=(lo, hi),
    )


def evolve(
    state: TasepState,
    waits: WaitingTimes,
    t_end: float,
    record: bool = False,
    check_exclusion: bool = False,
) -> Tuple[TasepState, JumpLog]:
    """Run the event-driven dynamics from state.time to t_end.

    The particle with the smallest simulated label is treated as unblocked;
    the caller must size the label range so that unsimulated particles
    cannot influence the observables (see lpp_bridge_check for the margin
    arithmetic).  Raises WindowError if any particle escapes the window.
    """
    if t_end < state.time:
        raise ParameterError("t_end precedes current state time")
    start_pos = state.positions.astype(np.int64)
    nlab = len(start_pos)
    label_min = state.label_min
    n_current = state.n_current
    elapsed = t_end - state.time
    # rate-1 jumps cannot carry a particle further than this; crossing it
    # means the window was mis-sized (or the clock logic broke)
    max_jumps = int(elapsed + 10.0 * math.sqrt(elapsed + 1.0) + 30.0)
    envelope = int(state.window[1]) + max_jumps

    # preload every clock each particle could possibly consume (the draws
    # are pure functions of the cell, so unused preloads change nothing)
    clocks = []
    for k in range(nlab):
        lab = label_min + k
        i_lo = int(start_pos[k]) + lab + 1
        clocks.append(waits.omega_row(lab, i_lo, i_lo + max_jumps).tolist())

    pos = [int(p) for p in start_pos]
    jumps = [0] * nlab
    pending = [False] * nlab
    rec_t: List[float] = []
    rec_k: List[int] = []
    heap: List[Tuple[float, int]] = []
    t0 = state.time
    for k in range(nlab):
        if k == 0 or pos[k - 1] > pos[k] + 1:
            heap.append((t0 + clocks[k][0], k))
            pending[k] = True
    heapq.heapify(heap)

    push = heapq.heappush
    pop = heapq.heappop
    while heap:
        t, k = pop(heap)
        if t > t_end:
            push(heap, (t, k))
            break
        pending[k] = False
        old = pos[k]
        new = old + 1
        if check_exclusion and k > 0 and pos[k - 1] <= new:
            raise AssertionError("exclusion violated")
        pos[k] = new
        jumps[k] += 1
        if jumps[k] >= max_jumps or new > envelope:
            raise WindowError(
                f"particle {label_min + k} reached site {new}, beyond the "
                f"physical envelope of window {state.window}; size the "
                "window for (t_end, rho)"
            )
        if new == 1:
            n_current += 1
        if record:
            rec_t.append(t)
            rec_k.append(k)
        # the particle behind, if adjacent, is unblocked at time t
        kb = k + 1
        if kb < nlab and pos[kb] == old - 1 and not pending[kb]:
            push(heap, (t + clocks[kb][jumps[kb]], kb))
            pending[kb] = True
        # this particle may keep moving
        if k == 0 or pos[k - 1] > new + 1:
            push(heap, (t + clocks[k][jumps[k]], k))
            pending[k] = True

    log = JumpLog()
    if record:
        log.times = rec_t
        log.labels = [label_min + k for k in rec_k]
        starts = start_pos.tolist()
        seen = [0] * nlab
        tg = []
        for k in rec_k:
            seen[k] += 1
            tg.append(starts[k] + seen[k])
        log.targets = tg
    out = TasepState(
        label_min=label_min,
        positions=np.array(pos, dtype=np.int64),
        time=t_end,
        n_current=n_current,
        window=state.window,
    )
    return out, log


def queue_exit_time(log: JumpLog, j: int, i: int) -> Optional[float]:
    """E_j(i): when customer j leaves queue i, under the mapping that puts
    particle j of the TASEP in queue x_j(t) + j.  Equals the time of the
    jump with clock index (i+1, j); None if not yet departed."""
    return log.jump_time(i + 1, j)


# ---------------------------------------------------------------------------
# the pathwise bridge


def _staircase_lpp(
    waits: WaitingTimes, x: int, row_lo: int, row_hi: int, row_start: Dict[int, int]
) -> Dict[Tuple[int, int], float]:
    """Serial last-passage recursion over the staircase domain
    {(i, j) : row_start[j] <= i <= x, row_lo <= j <= row_hi}; values bit-match
    the event-driven jump times."""
    out: Dict[Tuple[int, int], float] = {}
    prev: Dict[int, float] = {}
    for j in range(row_lo, row_hi + 1):
        i0 = row_start[j]
        if i0 > x:
            prev = {}
            continue
        w = waits.omega_row(j, i0, x)
        cur: Dict[int, float] = {}
        left = 0.0
        for i in range(i0, x + 1):
            below = prev.get(i, 0.0)
            best = left if left > below else below
            cur[i] = w[i - i0] + best
            left = cur[i]
        for i, v in cur.items():
            out[(i, j)] = v
        prev = cur
    return out


@dataclass
class BridgeReport:
    ok: bool
    x: int
    y: int
    l_value: float
    exit_time: Optional[float]
    checks: int
    witness: Optional[str] = None


def lpp_bridge_check(
    master_seed: int,
    sample_index: int,
    x: int,
    y: int,
    t_grid,
    rho: float = 0.5,
) -> BridgeReport:
    """Build the waiting-time field and the induced last-passage problem from
    one seed and assert, for every t in t_grid,

        x_y(t) >= x - y       <=>  L(x, y) <= t         (particle form)
        h_t(x-y-1) >= x+y-1   <=>  x_y(t) >= x - y       (height form)

    plus exact equality of L(x, y) with the simulated exit time E_y(x-1).
    Initial data: Bernoulli(rho) conditioned on site 0 empty, site 1
    occupied.

    The height form above is the exact pathwise identity.  A jump across
    bond j raises h(j) by 2 and bond-j crossings happen in label order, so
    h_t(j) >= x+y is the arrival of particle y at site j+1; displayed with
    h_t(x-y) the statement acquires a unit shift that matters pathwise
    (though not in the scaling limit), hence the -1 offsets here.
    """
    if x < 1 or y < 1:
        raise ParameterError("bridge requires x, y >= 1")
    seed = SeedSpec(master_seed, sample_index)
    waits = WaitingTimes(seed)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    t_cap = float(t_grid[-1])

    # occupation draws, conditioned at sites 0 and 1, fetched in blocks
    _occ_cache: Dict[int, np.ndarray] = {}

    def occupied(site: int) -> bool:
        if site == 0:
            return False
        if site == 1:
            return True
        block, off = divmod(site + (1 << 12), 64)
        if block not in _occ_cache:
            lo = block * 64 - (1 << 12)
            _occ_cache[block] = bernoulli_occupation(seed, lo, lo + 63, rho)
        return bool(_occ_cache[block][off])

    # labels <= 0 live on non-negative sites; include while the row domain
    # {i : x_j(0) + j < i <= x} is non-empty (monotone stopping rule)
    init_pos: Dict[int, int] = {0: 1}
    lab = 0
    site = 2
    while True:
        nxt = lab - 1
        found = None
        while found is None:
            if occupied(site):
                found = site
            site += 1
        if found >= x - nxt:
            break
        init_pos[nxt] = found
        lab = nxt
    label_min = lab

    # labels >= 1 live on negative sites; besides the y DP rows, include
    # everything close enough to influence N_t or the observed sites by t_cap
    j_floor = min(x - y, 0)
    reach = t_cap + 10.0 * math.sqrt(max(t_cap, 1.0)) + 25.0
    lab = 0
    site = -1
    while True:
        nxt = lab + 1
        found = None
        while found is None:
            if occupied(site):
                found = site
            site -= 1
        if nxt > y and found < j_floor - reach:
            break
        init_pos[nxt] = found
        lab = nxt
    label_max = lab

    labels = sorted(init_pos)
    positions = np.array([init_pos[l] for l in labels], dtype=np.int64)
    state = TasepState(
        label_min=labels[0],
        positions=positions,
        time=0.0,
        n_current=0,
        window=(
            min(int(positions.min()), j_floor) - 1,
            int(positions.max() + reach + x + 10),
        ),
    )
    state, log = evolve(state, waits, t_cap, record=True, check_exclusion=True)

    # DP over rows label_min..y (rows above y cannot feed (x, y))
    row_start = {j: init_pos[j] + j + 1 for j in range(label_min, y + 1)}
    dp = _staircase_lpp(waits, x, label_min, y, row_start)
    l_xy = dp[(x, y)]

    pos_y0 = init_pos[y]

    exit_t = queue_exit_time(log, y, x - 1)
    checks = 0
    witness = None

    if exit_t is not None and exit_t != l_xy:
        witness = f"E_y(x-1) = {exit_t!r} differs from L = {l_xy!r}"
    if exit_t is None and l_xy <= t_cap:
        witness = f"no exit event although L = {l_xy!r} <= {t_cap!r}"

    if witness is None:
        # single incremental replay of the time-ordered log: track N_t, the
        # occupied count over the height segment, and particle y's position
        j_site = x - y - 1  # height is probed one site left of the arrival
        if j_site >= 1:
            seg_lo, seg_hi = 1, j_site
        else:
            seg_lo, seg_hi = j_site + 1, 0
        seg_w = seg_hi - seg_lo + 1
        occ_in_seg = sum(1 for p in init_pos.values() if seg_lo <= p <= seg_hi)
        n_t = 0
        pos_y = pos_y0
        ev = 0
        n_ev = len(log.times)
        times = log.times
        labs = log.labels
        tgts = log.targets
        for t in t_grid:
            t = float(t)
            while ev < n_ev and times[ev] <= t:
                tgt = tgts[ev]
                if tgt == 1:
                    n_t += 1
                if tgt == seg_lo:
                    occ_in_seg += 1
                elif tgt == seg_hi + 1:
                    occ_in_seg -= 1
                if labs[ev] == y:
                    pos_y = tgt
                ev += 1
            particle_ok = pos_y >= x - y
            lpp_ok = l_xy <= t
            if particle_ok != lpp_ok:
                witness = f"particle/LPP mismatch at t={t}"
                break
            h_val = 2 * n_t
            if j_site != 0:
                signed = seg_w - 2 * occ_in_seg  # sum of (1 - 2 eta)
                h_val += signed if j_site >= 1 else -signed
            height_ok = h_val >= x + y - 1
            if height_ok != particle_ok:
                witness = f"height/particle mismatch at t={t} (h={h_val})"
                break
            checks += 1

    return BridgeReport(
        ok=witness is None,
        x=x,
        y=y,
        l_value=l_xy,
        exit_time=exit_t,
        checks=checks,
        witness=witness,
    )
