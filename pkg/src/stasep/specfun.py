"""Airy function, Gaussian tail integral, and quadrature primitives.

airy_ai is a self-contained float64 evaluator on [-40, 200]:

    x in (-4.3, 4.1)   Maclaurin series (entire-function Taylor at 0)
    x in [4.1, 7.6)    Chebyshev fit of the exponentially scaled function
    x >= 7.6           decaying asymptotic expansion, adaptively truncated
    x in (-7.6, -4.3]  Chebyshev fit of Ai itself
    x <= -7.6          oscillatory asymptotic expansion

The plain series/asymptotic pair cannot reach 1e-10 in double precision near
|x| ~ 5-7 (Taylor cancellation on one side, divergent-tail floor on the
other), hence the two mid-range Chebyshev tables; coefficients were fitted
offline against a 40-digit reference, fit residual < 2e-15.  Tests pin the
branch joints and the accuracy over the whole supported range.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy.special import erfc

from .errors import AccuracyError, DomainError, ParameterError

AIRY_MIN, AIRY_MAX = -40.0, 200.0

_AI0 = 0.35502805388781723926    # Ai(0)  = 3^(-2/3)/Gamma(2/3)
_DAI0 = -0.25881940379280679840  # Ai'(0) = -3^(-1/3)/Gamma(1/3)

# branch joints
_XA, _XB, _XC, _XD = -7.6, -4.3, 3.95, 7.6

_CHEB_NEG_LO, _CHEB_NEG_HI = -7.8, -4.2
_CHEB_POS_LO, _CHEB_POS_HI = 3.9, 7.8

_CHEB_NEG = np.array([
    0.12519204386446764, 0.015997939655579725, 0.1710928749358428,
    -0.07819563086687169, -0.23016996167708192, 0.05232771670212115,
    0.04888382174942337, -0.013488073133793245, -0.004084969874913341,
    0.0016429117226174615, 0.00011210855073862298, -0.0001093290102763668,
    5.851001230714189e-06, 4.151854742793491e-06, -6.408262390525717e-07,
    -7.726745674725003e-08, 2.6830457522259865e-08, -4.141661145458698e-10,
    -6.28505204051432e-10, 6.607554494700295e-11, 7.310227515970575e-12,
    -1.909630627097326e-12, 3.056545263085953e-14, 2.9436445188696136e-14,
    -2.644323459873827e-15, -1.5606432830235168e-16, 8.731294034140053e-18,
    7.626123664638303e-18, -5.642675022867263e-17, -2.5621286266658832e-17,
    -1.255139818426024e-16, -1.2407337688404463e-16, -4.423780559389715e-17,
    7.189315827066086e-17, 7.696145131812585e-17, 7.289855856347785e-18,
    3.208307813639336e-17,
])

_CHEB_POS_SCALED = np.array([
    0.9922946638149774, 0.003716183443188489, -0.0007456382668013077,
    0.0001390350408496828, -2.490541502522625e-05, 4.349518088555783e-06,
    -7.465225889117566e-07, 1.2654148940765586e-07, -2.1253615673316313e-08,
    3.5452431467381744e-09, -5.883159740054825e-10, 9.724912723764608e-11,
    -1.6028986229035366e-11, 2.63636956950817e-12, -4.329919592923593e-13,
    7.101039372125617e-14, -1.1688490057634262e-14, 1.890641784316544e-15,
    -3.332440156739631e-16, 3.2666607286566684e-17, -1.3925576600355214e-17,
    8.22763745198798e-18, -4.772528676253503e-18,
])


def _u_coeffs(n: int) -> np.ndarray:
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    return u


_U = _u_coeffs(40)


def _maclaurin(x: np.ndarray) -> np.ndarray:
    x3 = x * x * x
    f = np.ones_like(x)
    g = x.copy()
    tf = np.ones_like(x)
    tg = x.copy()
    for k in range(40):
        tf = tf * x3 / ((3 * k + 2.0) * (3 * k + 3.0))
        tg = tg * x3 / ((3 * k + 3.0) * (3 * k + 4.0))
        f += tf
        g += tg
    return _AI0 * f + _DAI0 * g


def _asym_pos(x: np.ndarray) -> np.ndarray:
    zeta = (2.0 / 3.0) * x**1.5
    total = np.zeros_like(x)
    term = np.ones_like(x)
    live = np.ones_like(x, dtype=bool)
    for k in range(len(_U) - 1):
        total = np.where(live, total + term, total)
        nxt = (-1.0) ** (k + 1) * _U[k + 1] / zeta ** (k + 1)
        live &= np.abs(nxt) < np.abs(term)
        term = nxt
    return np.exp(-zeta) / (2.0 * np.sqrt(np.pi) * x**0.25) * total


def _asym_neg(x: np.ndarray) -> np.ndarray:
    z = -x
    zeta = (2.0 / 3.0) * z**1.5
    se = np.zeros_like(z)
    so = np.zeros_like(z)
    live = np.ones_like(z, dtype=bool)
    for k in range(10):
        te = (-1.0) ** k * _U[2 * k] / zeta ** (2 * k)
        to = (-1.0) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1)
        se = np.where(live, se + te, se)
        so = np.where(live, so + to, so)
        live &= _U[2 * k + 2] / zeta ** (2 * k + 2) < np.abs(te)
    ang = zeta - 0.25 * np.pi
    return (np.cos(ang) * se + np.sin(ang) * so) / (np.sqrt(np.pi) * z**0.25)


def _chebval_on(c: np.ndarray, lo: float, hi: float, x: np.ndarray) -> np.ndarray:
    t = (2.0 * x - (lo + hi)) / (hi - lo)
    return np.polynomial.chebyshev.chebval(t, c)


def airy_ai(x):
    """Ai(x) for x in [-40, 200], relative accuracy ~1e-11 or better away
    from zeros (absolute ~1e-13 near them)."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if arr.size and (np.min(arr) < AIRY_MIN or np.max(arr) > AIRY_MAX):
        raise DomainError(
            f"airy_ai argument outside supported range [{AIRY_MIN}, {AIRY_MAX}]"
        )
    out = np.empty_like(arr)
    m = arr < _XA
    if m.any():
        out[m] = _asym_neg(arr[m])
    m = (arr >= _XA) & (arr <= _XB)
    if m.any():
        out[m] = _chebval_on(_CHEB_NEG, _CHEB_NEG_LO, _CHEB_NEG_HI, arr[m])
    m = (arr > _XB) & (arr < _XC)
    if m.any():
        out[m] = _maclaurin(arr[m])
    m = (arr >= _XC) & (arr < _XD)
    if m.any():
        xs = arr[m]
        zeta = (2.0 / 3.0) * xs**1.5
        s = _chebval_on(_CHEB_POS_SCALED, _CHEB_POS_LO, _CHEB_POS_HI, xs)
        out[m] = s * np.exp(-zeta) / (2.0 * np.sqrt(np.pi) * xs**0.25)
    m = arr >= _XD
    if m.any():
        out[m] = _asym_pos(arr[m])
    return float(out[0]) if scalar else out


def gaussian_tail_integral(u: float, v: float):
    """integral_{-inf}^{u} exp(-y^2/(4v)) dy = sqrt(pi v) erfc(-u/(2 sqrt(v)));
    u may be an array."""
    if not v > 0:
        raise ParameterError(f"variance parameter v must be positive, got {v}")
    u = np.asarray(u, dtype=float)
    out = np.sqrt(np.pi * v) * erfc(-u / (2.0 * np.sqrt(v)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: Tuple[float, float]

    def integrate(self, f: Callable) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def legendre_rule(n: int, lo: float, hi: float) -> QuadratureRule:
    """Gauss-Legendre rule with n nodes on [lo, hi]."""
    if n < 1:
        raise ParameterError("need at least one node")
    if not hi > lo:
        raise ParameterError(f"empty interval [{lo}, {hi}]")
    t, w = _leggauss(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return QuadratureRule(nodes=half * t + mid, weights=half * w, interval=(lo, hi))


def composite_rule(lo: float, hi: float, n_panels: int, nodes_per_panel: int) -> QuadratureRule:
    """Composite Gauss-Legendre: n_panels equal panels on [lo, hi]."""
    edges = np.linspace(lo, hi, n_panels + 1)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        r = legendre_rule(nodes_per_panel, a, b)
        xs.append(r.nodes)
        ws.append(r.weights)
    return QuadratureRule(
        nodes=np.concatenate(xs), weights=np.concatenate(ws), interval=(lo, hi)
    )


def semiinfinite_rule(
    lo: float, length: float, panel_width: float = 2.0, nodes_per_panel: int = 24
) -> QuadratureRule:
    """Truncated [lo, lo+length) rule for superexponentially decaying integrands."""
    n_panels = max(2, int(np.ceil(length / panel_width)))
    return composite_rule(lo, lo + length, n_panels, nodes_per_panel)


def integrate_semiinfinite(
    f: Callable,
    lo: float,
    decay_scale: float,
    bound_coeff: float = 1.0,
    tail_tol: float = 1e-13,
    rel_tol: float = 1e-10,
    abs_floor: float = 1e-13,
) -> float:
    """integral_{lo}^{inf} f, for |f(x)| <= bound_coeff * exp(-x/decay_scale)
    eventually (caller-asserted decay certificate).

    Truncates where the certified tail drops below tail_tol, then integrates
    with composite Gauss-Legendre panels; the result must survive a
    panel-doubling Cauchy check or an AccuracyError (carrying both
    estimates) is raised.
    """
    if not decay_scale > 0:
        raise ParameterError("decay_scale must be positive")
    lam = decay_scale * max(
        np.log(max(bound_coeff, 1e-300) * decay_scale / tail_tol), 5.0
    )
    lam = max(lam, 4.0 * decay_scale, 1.0)
    rule = semiinfinite_rule(lo, lam, panel_width=min(2.0, lam / 4.0))
    coarse = rule.integrate(f)
    rule2 = semiinfinite_rule(lo, lam, panel_width=min(1.0, lam / 8.0))
    fine = rule2.integrate(f)
    if abs(fine - coarse) > max(abs_floor, rel_tol * abs(fine)):
        raise AccuracyError(
            f"quadrature Cauchy check failed: {coarse!r} vs {fine!r}",
            coarse=coarse,
            fine=fine,
        )
    return fine
