"""Counter-based reproducible randomness.

Every random quantity in the package is a pure function of
(master_seed, sample_index, tag, i, j).  The generator is a splitmix64-style
avalanche hash applied to a packed counter, which gives O(1) random access to
any lattice cell: weight fields can be materialized row by row, in parallel,
or in any traversal order, and always come out bit-identical.

Tags partition the 64-bit counter space into independent lanes (bulk weight
field, boundary geometrics, TASEP clocks, initial occupations, ...).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

_PHI = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64

# counter layout: [tag:4][j:30][i:30]
_INDEX_BITS = 30
_INDEX_CAP = 1 << _INDEX_BITS
_TAG_CAP = 16

# lanes
TAG_FIELD = 0        # LPP weight field uniforms
TAG_ZETA = 1         # Bernoulli-domain boundary geometrics
TAG_OMEGA = 2        # TASEP jump clocks
TAG_INIT = 3         # initial occupation variables
TAG_QUEUE_ARR = 4    # tandem-queue arrival gaps
TAG_QUEUE_SRV = 5    # tandem-queue service times
TAG_QUEUE_LEN = 6    # tandem-queue initial lengths
TAG_SCRATCH = 7      # sequential CounterStream draws


def _mix64(z):
    """splitmix64 finalizer; operates on uint64 scalars or arrays, wrapping."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _M1
        z = (z ^ (z >> _U64(27))) * _M2
        return z ^ (z >> _U64(31))


def stream_key(master_seed: int, sample_index: int) -> np.uint64:
    """Derive the per-sample stream key.  Distinct (seed, index) pairs give
    statistically independent lanes."""
    ms = _U64(master_seed & 0xFFFFFFFFFFFFFFFF)
    si = _U64(sample_index & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return _mix64(_mix64(ms ^ _PHI) + si * _M2)


def counter_hash(key, tag: int, i, j):
    """Raw 64-bit output for cells (i, j) in lane `tag`.  i and j may be
    numpy integer arrays (broadcast); both must lie in [0, 2**30)."""
    if not 0 <= tag < _TAG_CAP:
        raise DomainError(f"tag {tag} outside [0, {_TAG_CAP})")
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    if i.size and (int(i.max()) >= _INDEX_CAP or int(j.max()) >= _INDEX_CAP):
        raise DomainError("lattice index exceeds 2**30 counter capacity")
    with np.errstate(over="ignore"):
        c = (_U64(tag) << _U64(60)) | (j << _U64(_INDEX_BITS)) | i
        return _mix64(_mix64(c + _U64(key) * _PHI))


def uniform_oc(key, tag: int, i, j):
    """Uniform variates on (0, 1], exactly representable, never zero."""
    h = counter_hash(key, tag, i, j)
    return ((h >> _U64(11)) + _U64(1)) * 2.0 ** -53


def exp_from_uniform(u, mean):
    """Inverse-CDF exponential with the stated EXPECTATION `mean`.
    u = 1 maps to exactly 0."""
    return -mean * np.log(u)


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one Monte Carlo sample's randomness."""

    master_seed: int
    sample_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "sample_index"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ParameterError(f"{name} must be a 64-bit unsigned integer")

    @property
    def key(self) -> np.uint64:
        return stream_key(self.master_seed, self.sample_index)

    def child(self, sample_index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, sample_index)


class CounterStream:
    """Sequential draws from one lane.  Deterministic given the construction
    point; used for ad-hoc scalar sampling (boundary geometrics, queue
    streams).  Lattice fields never go through this class."""

    def __init__(self, seed: SeedSpec, tag: int = TAG_SCRATCH, lane: int = 0):
        self._key = seed.key
        self._tag = tag
        self._lane = lane
        self._n = 0

    def uniform(self) -> float:
        u = float(uniform_oc(self._key, self._tag, self._n, self._lane))
        self._n += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        idx = np.arange(self._n, self._n + n)
        self._n += n
        return uniform_oc(self._key, self._tag, idx, self._lane)


def sample_exp(stream: CounterStream, mean: float) -> float:
    """One draw, exponential with EXPECTATION `mean` (rate 1/mean)."""
    if not mean > 0:
        raise ParameterError(f"exponential mean must be positive, got {mean}")
    return float(-mean * np.log(stream.uniform()))


def sample_exp_many(stream: CounterStream, mean: float, n: int) -> np.ndarray:
    if not mean > 0:
        raise ParameterError(f"exponential mean must be positive, got {mean}")
    return -mean * np.log(stream.uniforms(n))


def sample_geom(stream: CounterStream, q: float) -> int:
    """One draw with P(X = k) = (1-q) q^k, k >= 0.  Note the starred
    convention Geom*(1-rho) used for queue lengths is the same law with
    q = 1-rho, i.e. P(X = k) = rho (1-rho)^k."""
    if not 0 <= q < 1:
        raise ParameterError(f"geometric parameter must be in [0,1), got {q}")
    if q == 0.0:
        stream.uniform()  # keep the stream position predictable
        return 0
    u = stream.uniform()
    return int(np.floor(np.log(u) / np.log(q)))
