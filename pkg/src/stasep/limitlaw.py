"""Multi-point limit law: extended Airy kernel with shifted entries, block
Fredholm determinant, the resolvent correction functional, and the final CDF

    F(tau, s) = sum_k d/ds_k [ g_m(tau, s) * det(1 - P_s Khat P_s) ].

Kernel (row index i, column index j, Delta = tau_i - tau_j):

    Khat_{ij}(x, y) = int_0^inf Ai(x+l+tau_i^2) Ai(y+l+tau_j^2) e^{-l(tau_j-tau_i)} dl
                      - 1[tau_i > tau_j] *
                        exp(-(x-y)^2/(4 Delta) + (2/3)(tau_j^3 - tau_i^3)
                            + tau_j y - tau_i x) / sqrt(4 pi Delta)

For tau_i > tau_j this is the rewrite of -int_{-inf}^0 via the bilinear
Airy convolution identity; khat_dual_check evaluates both routes.

Discretization: per threshold k, an n-node Gauss-Legendre rule on
[s_k, s_k + Lambda]; the block matrix is balanced with sqrt(w_p w_q) so one
LU serves both det(1-D) and the resolvent solve.  The inner product keeps
its identity component exact:

    <rho P Phi, P Psi> = <Phi, Psi>_w + psi^T (1-D)^{-1} D phi.

s-derivatives are central differences (the whole system is rebuilt at the
shifted thresholds, nodes moving with the interval) with one Richardson
step.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import AccuracyError, InvertibilityError, ParameterError
from .specfun import airy_ai, composite_rule, gaussian_tail_integral, legendre_rule

M_CAP = 8


@dataclass(frozen=True)
class MultiPointSpec:
    """tau_1 < ... < tau_m with thresholds s_1, ..., s_m."""

    taus: Tuple[float, ...]
    esses: Tuple[float, ...]

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        esses = tuple(float(s) for s in self.esses)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "esses", esses)
        if len(taus) != len(esses):
            raise ParameterError("taus and esses must have equal length")
        if not 1 <= len(taus) <= M_CAP:
            raise ParameterError(f"m must be in [1, {M_CAP}]")
        if any(t2 <= t1 for t1, t2 in zip(taus, taus[1:])):
            raise ParameterError("taus must be strictly increasing (equal taus rejected)")
        if not all(map(math.isfinite, taus + esses)):
            raise ParameterError("taus and esses must be finite")

    @property
    def m(self) -> int:
        return len(self.taus)

    def with_esses(self, esses) -> "MultiPointSpec":
        return MultiPointSpec(self.taus, tuple(esses))


@dataclass(frozen=True)
class QuadratureConfig:
    n: int = 64               # Gauss-Legendre nodes per threshold interval
    big_lambda: float = 12.0  # truncation length of [s_k, s_k + Lambda]
    h_fd: float = 1e-3        # step for the s_k central differences
    lambda_panel: float = 1.5
    lambda_nodes: int = 24
    tail_exponent: float = 42.0  # e^-42 ~ 5e-19 certified tail mass

    def __post_init__(self):
        if self.n < 16:
            raise ParameterError("need n >= 16 nodes per interval")
        if self.big_lambda < 8:
            raise ParameterError("need Lambda >= 8")
        if not 1e-5 <= self.h_fd <= 1e-2:
            raise ParameterError("h_fd must lie in [1e-5, 1e-2]")

    def refined(self) -> "QuadratureConfig":
        """The (2n, Lambda+4) companion used for convergence checks."""
        return QuadratureConfig(
            n=2 * self.n,
            big_lambda=self.big_lambda + 4.0,
            h_fd=self.h_fd,
            lambda_panel=self.lambda_panel,
            lambda_nodes=self.lambda_nodes,
            tail_exponent=self.tail_exponent,
        )


def _airy_log_envelope(t: float) -> float:
    """log upper bound for |Ai(t)|; ~ -2/3 t^(3/2) on t>0, O(1) below."""
    if t <= 0.0:
        return -1.0
    return -(2.0 / 3.0) * t**1.5 - 0.25 * math.log(max(t, 1.0)) - 1.26


def _grow_length(rate: float, shift: float, target: float, start: float = 16.0) -> float:
    """Smallest L (on a coarse ladder) with
    2*|log Ai(L + shift)| - rate*L >= target: certifies the truncated tail of
    a doubly-Airy integrand against an e^{rate*l} factor."""
    L = start
    while L < 120.0:
        if -2.0 * _airy_log_envelope(L + shift) - rate * L >= target:
            return L
        L += 4.0
    return L


def _grow_length_single(rate: float, shift: float, target: float) -> float:
    """As above for a single Airy factor against e^{rate*l}."""
    L = 16.0
    while L < 160.0:
        if -_airy_log_envelope(L + shift) - rate * L >= target:
            return L
        L += 4.0
    return L


class NystromSystem:
    """Quadrature grids, the balanced block kernel matrix, and Definition-1.1
    ingredient tables for one (spec, config) pair."""

    def __init__(self, spec: MultiPointSpec, quad: QuadratureConfig):
        self.spec = spec
        self.quad = quad
        m = spec.m
        taus = np.array(spec.taus)
        esses = np.array(spec.esses)
        n = quad.n

        # Per-interval truncation: [s_k, s_k + Lambda_k].  Lambda_k must cover
        # the Psi*Phi pairing tail, which decays like
        # exp(tau_max * u - 2/3 (u + tau_min^2)^{3/2}) from the Airy pieces
        # and like exp(-(u - s_1)^2 / (4 (tau_k - tau_1))) from the Gaussian
        # piece of Phi_k (k >= 2); extend until both certify e^-30.
        target = 30.0
        tau_pos = max(float(taus.max()), 0.0)
        tau_min_sq = float((taus**2).min())
        u_star = float(esses.max()) + quad.big_lambda
        while u_star < float(esses.max()) + 120.0:
            if (2.0 / 3.0) * max(u_star + tau_min_sq, 0.0) ** 1.5 - tau_pos * u_star >= target:
                break
            u_star += 0.5
        lengths = []
        for k in range(m):
            lk = max(quad.big_lambda, u_star - esses[k])
            if k >= 1:
                gauss_reach = esses[0] + math.sqrt(4.0 * target * (taus[k] - taus[0]))
                lk = max(lk, gauss_reach - esses[k])
            lengths.append(lk)
        self.lengths = lengths

        rules = [legendre_rule(n, s, s + lk) for s, lk in zip(esses, lengths)]
        self.nodes = [r.nodes for r in rules]
        self.weights = [r.weights for r in rules]
        sqw = [np.sqrt(w) for w in self.weights]

        # shared lambda grid for all int_0^inf d-lambda factors
        dmax = float(taus[-1] - taus[0]) if m > 1 else 0.0
        shift = float(esses.min() + (taus**2).min())
        lam_len = _grow_length(dmax, shift, quad.tail_exponent)
        lam_rule = composite_rule(
            0.0,
            lam_len,
            max(4, int(np.ceil(lam_len / quad.lambda_panel))),
            quad.lambda_nodes,
        )
        self.lam = lam_rule.nodes
        self.lam_w = lam_rule.weights
        self.lam_len = lam_len

        # Ai(x_p^(i) + tau_i^2 + lambda_l), one table per block index
        self.ai_tables = [
            airy_ai(self.nodes[i][:, None] + taus[i] ** 2 + self.lam[None, :])
            for i in range(m)
        ]

        blocks = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(m):
                decay = np.exp(-self.lam * (taus[j] - taus[i])) * self.lam_w
                blk = (self.ai_tables[i] * decay[None, :]) @ self.ai_tables[j].T
                if taus[i] > taus[j]:
                    blk = blk - self._gauss_term(i, j)
                blocks[i][j] = sqw[i][:, None] * blk * sqw[j][None, :]
        self.matrix = np.block(blocks)
        self._lu: Optional[Tuple] = None
        self._det: Optional[float] = None

    def _gauss_term(self, i: int, j: int) -> np.ndarray:
        taus = self.spec.taus
        x = self.nodes[i][:, None]
        y = self.nodes[j][None, :]
        delta = taus[i] - taus[j]
        expo = (
            -((x - y) ** 2) / (4.0 * delta)
            + (2.0 / 3.0) * (taus[j] ** 3 - taus[i] ** 3)
            + taus[j] * y
            - taus[i] * x
        )
        return np.exp(expo) / np.sqrt(4.0 * np.pi * delta)

    @property
    def det(self) -> float:
        if self._det is None:
            a = np.eye(self.matrix.shape[0]) - self.matrix
            sign, logabs = np.linalg.slogdet(a)
            if sign <= 0:
                raise InvertibilityError(
                    f"Nystrom determinant non-positive (sign={sign}); "
                    "the continuum operator is provably invertible, so refine "
                    "the discretization"
                )
            self._det = float(sign * np.exp(logabs))
        return self._det

    def resolvent_inner(self, phi: np.ndarray, psi: np.ndarray) -> float:
        """<rho P Phi, P Psi> with the identity component kept exact.

        phi, psi are node tables of shape (m, n), row k sampled on nodes[k].
        """
        sq = np.concatenate([np.sqrt(w) for w in self.weights])
        f = sq * np.concatenate(phi)
        g = sq * np.concatenate(psi)
        direct = float(g @ f)
        a = np.eye(self.matrix.shape[0]) - self.matrix
        z = np.linalg.solve(a, self.matrix @ f)
        return direct + float(g @ z)


# ---------------------------------------------------------------------------
# kernel entries (scalar routes, used by tests and the dual-representation
# check; the Nystrom assembly above evaluates the same formulas in bulk)


def _khat_nonneg_branch(tau_i, tau_j, x, y, tail_exponent=42.0):
    """int_0^inf Ai(x+l+tau_i^2) Ai(y+l+tau_j^2) e^{-l(tau_j-tau_i)} dl."""
    rate = max(tau_i - tau_j, 0.0)
    shift = min(x + tau_i**2, y + tau_j**2)
    length = _grow_length(rate, shift, tail_exponent)
    rule = composite_rule(0.0, length, max(4, int(np.ceil(length / 1.5))), 24)
    lam = rule.nodes
    vals = (
        airy_ai(x + lam + tau_i**2)
        * airy_ai(y + lam + tau_j**2)
        * np.exp(-lam * (tau_j - tau_i))
    )
    return float(np.dot(rule.weights, vals))


def _khat_gauss_term(tau_i, tau_j, x, y):
    delta = tau_i - tau_j
    expo = (
        -((x - y) ** 2) / (4.0 * delta)
        + (2.0 / 3.0) * (tau_j**3 - tau_i**3)
        + tau_j * y
        - tau_i * x
    )
    return float(np.exp(expo) / np.sqrt(4.0 * np.pi * delta))


def khat(spec: MultiPointSpec, i: int, j: int, x: float, y: float) -> float:
    """Extended Airy kernel entry [Khat]_{ij}(x, y); i, j are 1-based."""
    if not (1 <= i <= spec.m and 1 <= j <= spec.m):
        raise ParameterError(f"block indices must lie in [1, {spec.m}]")
    ti, tj = spec.taus[i - 1], spec.taus[j - 1]
    val = _khat_nonneg_branch(ti, tj, x, y)
    if ti > tj:
        val -= _khat_gauss_term(ti, tj, x, y)
    return val


def khat_dual_check(
    spec: MultiPointSpec, i: int, j: int, x: float, y: float
) -> Tuple[float, float, float]:
    """For tau_i > tau_j: the direct -int_{-inf}^0 branch (lhs) against the
    'lambda>=0 integral minus Gaussian' rewrite (rhs), plus their gap."""
    if not (1 <= i <= spec.m and 1 <= j <= spec.m):
        raise ParameterError(f"block indices must lie in [1, {spec.m}]")
    ti, tj = spec.taus[i - 1], spec.taus[j - 1]
    if not ti > tj:
        raise ParameterError("dual check applies to the tau_i > tau_j branch only")
    delta = ti - tj
    # envelope: |Ai Ai e^{l delta}| <= 0.3 e^{l delta} for l -> -inf
    length = min((math.log(0.3) + 23.0) / delta + 8.0, 34.0)
    n_panels = max(8, int(np.ceil(length / 0.5)))
    rule = composite_rule(-length, 0.0, n_panels, 16)
    lam = rule.nodes
    vals = (
        airy_ai(x + lam + ti**2)
        * airy_ai(y + lam + tj**2)
        * np.exp(-lam * (tj - ti))
    )
    lhs = -float(np.dot(rule.weights, vals))
    rhs = _khat_nonneg_branch(ti, tj, x, y) - _khat_gauss_term(ti, tj, x, y)
    return lhs, rhs, abs(lhs - rhs)


def airy_convolution_identity(
    b1: float, b2: float, c1: float, c2: float
) -> Tuple[float, float, float]:
    """Bilinear Airy convolution over the whole line (requires b2 < b1):

        int_R e^{-l(b2-b1)} Ai(b1^2+c1+l) Ai(b2^2+c2+l) dl
          = exp(-(c2-c1)^2/(4(b1-b2)) + 2/3 (b2^3-b1^3) + b2 c2 - b1 c1)
            / sqrt(4 pi (b1-b2))

    Returns (quadrature lhs, closed-form rhs, gap)."""
    if not b2 < b1:
        raise ParameterError("identity requires b2 < b1 (divergent otherwise)")
    pos = _khat_nonneg_branch(b1, b2, c1, c2)
    delta = b1 - b2
    length = min((math.log(0.3) + 23.0) / delta + 8.0, 34.0)
    rule = composite_rule(-length, 0.0, max(8, int(np.ceil(length / 0.5))), 16)
    lam = rule.nodes
    neg = float(
        np.dot(
            rule.weights,
            airy_ai(b1**2 + c1 + lam) * airy_ai(b2**2 + c2 + lam) * np.exp(lam * delta),
        )
    )
    lhs = pos + neg
    rhs = _khat_gauss_term(b1, b2, c1, c2)
    return lhs, rhs, abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Definition 1.1 ingredients


@dataclass
class Def11Terms:
    r_value: float
    psi: np.ndarray  # (m, n) tables on the system nodes
    phi: np.ndarray


def _r_value(spec: MultiPointSpec, tail_exponent: float = 42.0) -> float:
    """R = s1 + e^{-2/3 tau1^3} int_{s1}^inf du (u - s1) Ai(u + tau1^2) e^{-tau1 u}
    (the double integral collapsed along u = x + y)."""
    t1 = spec.taus[0]
    s1 = spec.esses[0]
    rate = max(-t1, 0.0)
    length = _grow_length_single(rate, s1 + t1**2, tail_exponent + max(-t1 * s1, 0.0))
    rule = composite_rule(s1, s1 + length, max(6, int(np.ceil(length / 1.5))), 24)
    u = rule.nodes
    integrand = (u - s1) * airy_ai(u + t1**2) * np.exp(-t1 * u)
    return s1 + math.exp(-(2.0 / 3.0) * t1**3) * float(np.dot(rule.weights, integrand))


def _psi_values(tau_j: float, y: np.ndarray, tail_exponent: float = 42.0) -> np.ndarray:
    """Psi_j(y) = e^{2/3 tau_j^3 + tau_j y} - int_0^inf Ai(x+y+tau_j^2) e^{-tau_j x} dx."""
    rate = max(-tau_j, 0.0)
    shift = float(np.min(y)) + tau_j**2
    length = _grow_length_single(rate, shift, tail_exponent)
    rule = composite_rule(0.0, length, max(6, int(np.ceil(length / 1.5))), 24)
    x = rule.nodes
    table = airy_ai(y[:, None] + tau_j**2 + x[None, :])
    integral = table @ (rule.weights * np.exp(-tau_j * x))
    return np.exp((2.0 / 3.0) * tau_j**3 + tau_j * y) - integral


def _phi_values(
    spec: MultiPointSpec,
    i: int,
    x: np.ndarray,
    lam: np.ndarray,
    lam_w: np.ndarray,
    b_table: np.ndarray,
    tail_exponent: float = 42.0,
) -> np.ndarray:
    """Phi_i(x) on the nodes, i 0-based; b_table holds
    B(l) = int_{s1}^inf e^{-tau1 y} Ai(y + tau1^2 + l) dy on the lambda grid."""
    taus = spec.taus
    t1 = taus[0]
    ti = taus[i]
    ai_x = airy_ai(x[:, None] + ti**2 + lam[None, :])
    term1 = math.exp(-(2.0 / 3.0) * t1**3) * (
        ai_x @ (lam_w * np.exp(-lam * (t1 - ti)) * b_table)
    )
    if i >= 1:
        delta = ti - t1
        tail = gaussian_tail_integral(spec.esses[0] - x, delta)
        term2 = (
            np.exp(-(2.0 / 3.0) * ti**3 - ti * x)
            / math.sqrt(4.0 * math.pi * delta)
            * tail
        )
    else:
        term2 = 0.0
    rate = max(ti, 0.0)
    shift = float(np.min(x)) + ti**2
    length = _grow_length_single(rate, shift, tail_exponent)
    rule = composite_rule(0.0, length, max(6, int(np.ceil(length / 1.5))), 24)
    ygrid = rule.nodes
    term3 = airy_ai(x[:, None] + ti**2 + ygrid[None, :]) @ (
        rule.weights * np.exp(ti * ygrid)
    )
    return term1 + term2 - term3


def def11_terms(spec: MultiPointSpec, quad: QuadratureConfig, system: Optional[NystromSystem] = None) -> Def11Terms:
    """R, Psi_j, Phi_i tabulated at the Nystrom nodes."""
    sysm = system if system is not None else NystromSystem(spec, quad)
    t1 = spec.taus[0]
    s1 = spec.esses[0]
    # B(l) on the shared lambda grid
    rate = max(-t1, 0.0)
    length = _grow_length_single(rate, s1 + t1**2, quad.tail_exponent + max(-t1 * s1, 0.0))
    yrule = composite_rule(s1, s1 + length, max(6, int(np.ceil(length / 1.5))), 24)
    yg = yrule.nodes
    b_table = (
        np.exp(-t1 * yg) * yrule.weights
    ) @ airy_ai(yg[:, None] + t1**2 + sysm.lam[None, :])

    psi = np.stack(
        [_psi_values(spec.taus[j], sysm.nodes[j], quad.tail_exponent) for j in range(spec.m)]
    )
    phi = np.stack(
        [
            _phi_values(spec, i, sysm.nodes[i], sysm.lam, sysm.lam_w, b_table, quad.tail_exponent)
            for i in range(spec.m)
        ]
    )
    return Def11Terms(r_value=_r_value(spec, quad.tail_exponent), psi=psi, phi=phi)


def psi_function(spec: MultiPointSpec, j: int, y) -> np.ndarray:
    """Psi_j at arbitrary points (j 1-based); test/oracle surface."""
    return _psi_values(spec.taus[j - 1], np.atleast_1d(np.asarray(y, dtype=float)))


def phi_function(spec: MultiPointSpec, i: int, x, quad: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Phi_i at arbitrary points (i 1-based); test/oracle surface."""
    quad = quad or QuadratureConfig()
    sysm = NystromSystem(spec, quad)
    t1 = spec.taus[0]
    s1 = spec.esses[0]
    rate = max(-t1, 0.0)
    length = _grow_length_single(rate, s1 + t1**2, quad.tail_exponent + max(-t1 * s1, 0.0))
    yrule = composite_rule(s1, s1 + length, max(6, int(np.ceil(length / 1.5))), 24)
    yg = yrule.nodes
    b_table = (
        np.exp(-t1 * yg) * yrule.weights
    ) @ airy_ai(yg[:, None] + t1**2 + sysm.lam[None, :])
    return _phi_values(
        spec, i - 1, np.atleast_1d(np.asarray(x, dtype=float)), sysm.lam, sysm.lam_w, b_table
    )


# ---------------------------------------------------------------------------
# determinant, g_m, and the CDF


def fredholm_det(spec: MultiPointSpec, quad: QuadratureConfig = QuadratureConfig()) -> float:
    """det(1 - P_s Khat P_s) by the balanced Nystrom discretization."""
    return NystromSystem(spec, quad).det


def g_m(spec: MultiPointSpec, quad: QuadratureConfig = QuadratureConfig(), system: Optional[NystromSystem] = None) -> float:
    """g_m(tau, s) = R - <rho P_s Phi, P_s Psi>.

    The sign matches the finite-size functional this is the limit of
    (R enters with +, the resolvent pairing of Phi against Psi with -);
    with + the tau -> -tau symmetry of the one-point law fails, which pins
    the sign unambiguously.
    """
    sysm = system if system is not None else NystromSystem(spec, quad)
    terms = def11_terms(spec, quad, sysm)
    return terms.r_value - sysm.resolvent_inner(terms.phi, terms.psi)


def _product_value(spec: MultiPointSpec, quad: QuadratureConfig) -> Tuple[float, float, float]:
    sysm = NystromSystem(spec, quad)
    det = sysm.det
    g = g_m(spec, quad, sysm)
    return g * det, det, g


@dataclass
class LimitLawResult:
    f_value: float
    det_value: float
    g_value: float
    partials: np.ndarray
    diagnostics: Dict[str, float] = field(default_factory=dict)


def limit_cdf(
    spec: MultiPointSpec,
    quad: QuadratureConfig = QuadratureConfig(),
    alarm_band: float = 1e-3,
) -> LimitLawResult:
    """F = sum_k d/ds_k (g_m * det), Richardson-extrapolated central
    differences in each threshold."""
    _, det0, g0 = _product_value(spec, quad)
    m = spec.m
    esses = np.array(spec.esses)
    partials = np.empty(m)
    fd_spread = np.empty(m)

    def product_at(svec) -> float:
        return _product_value(spec.with_esses(svec), quad)[0]

    for k in range(m):
        h = quad.h_fd
        ek = np.zeros(m)
        ek[k] = 1.0
        d_h = (product_at(esses + h * ek) - product_at(esses - h * ek)) / (2 * h)
        d_h2 = (product_at(esses + 0.5 * h * ek) - product_at(esses - 0.5 * h * ek)) / h
        partials[k] = (4.0 * d_h2 - d_h) / 3.0
        fd_spread[k] = abs(d_h2 - d_h)

    f = float(partials.sum())
    if not (-alarm_band <= f <= 1.0 + alarm_band):
        raise AccuracyError(
            f"limit CDF value {f} outside [-{alarm_band}, 1+{alarm_band}]: "
            "numerics alarm"
        )
    return LimitLawResult(
        f_value=f,
        det_value=det0,
        g_value=g0,
        partials=partials,
        diagnostics={
            "n": quad.n,
            "big_lambda": quad.big_lambda,
            "h_fd": quad.h_fd,
            "fd_spread_max": float(fd_spread.max()),
        },
    )


def invertibility_guard(
    spec: MultiPointSpec, quad: QuadratureConfig = QuadratureConfig()
) -> Tuple[bool, Dict[str, float]]:
    """det(1-D) > 0 check.  The continuum determinant is bounded below by a
    strictly positive constant depending only on min_k s_k, so a non-positive
    value here indicts the discretization, not the operator."""
    sysm = NystromSystem(spec, quad)
    a = np.eye(sysm.matrix.shape[0]) - sysm.matrix
    sign, logabs = np.linalg.slogdet(a)
    det = float(sign * np.exp(logabs))
    return bool(sign > 0), {"det": det, "sign": float(sign)}


def convergence_gap(
    spec: MultiPointSpec, quad: QuadratureConfig = QuadratureConfig()
) -> Dict[str, float]:
    """|value(n, Lambda) - value(2n, Lambda+4)| for F, det, and g."""
    base = limit_cdf(spec, quad)
    fine = limit_cdf(spec, quad.refined())
    return {
        "f_gap": abs(base.f_value - fine.f_value),
        "det_gap": abs(base.det_value - fine.det_value),
        "g_gap": abs(base.g_value - fine.g_value),
        "f": base.f_value,
        "f_refined": fine.f_value,
    }
