"""Correlation tensor and the key correlation F(zeta) by independent routes.

Routes for F = <Pi_x (x) Pi_x>:

* ``f_direct``    Schmidt-form contraction with the even/odd coefficients.
* ``f_trace``     sinh(2 zeta)/2 [Tr(rho U1 rho U2) + Tr(rho U1^+ rho U2^+)].
* ``f_position_integral``  2 int int (g+^2 - g-^2) over the positive quadrant.
* ``f_closed``    the three analytic curves.

Channel-2 index convention: a config's ``u`` always holds <2n|Pi_+|2m+1>;
the trace route works with U2[m, n] = <2n|Pi_+^(2)|2m+1>, i.e. ``cfg2.u.T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, QuadratureInsufficient, UnknownTag
from .fock import ReducedDensity, TmsvState, check_zeta
from .pseudospin import OperatorSet, PseudospinConfig
from .quadrature import DEFAULT_QUAD_TOL, QuadratureSpec, gauss_legendre

ROUTE_TOL = 1e-12
CLOSED_FORMS = ("position", "number", "alt-phase")
AXES = "xyz"


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """k[i, j] = <zeta| Pi_i^(1) (x) Pi_j^(2) |zeta>, i, j over x, y, z."""

    k: np.ndarray

    def __post_init__(self):
        k = np.array(self.k, dtype=np.float64, copy=True)
        if k.shape != (3, 3):
            raise ValueError(f"correlation tensor must be 3x3, got {k.shape}")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    def __getitem__(self, ij: str) -> float:
        """Entry by axis names, e.g. ``tensor['xx']``."""
        return float(self.k[AXES.index(ij[0]), AXES.index(ij[1])])

    @classmethod
    def diag(cls, fx: float, fy: float, fz: float) -> CorrelationTensor:
        return cls(np.diag([fx, fy, fz]))


@dataclass(frozen=True)
class FResult:
    f: float
    plus_plus: complex
    minus_minus: complex
    condition15_ok: bool
    route: str
    imag_residual: float = 0.0


def condition15(plus_plus: complex, minus_minus: complex, tol: float = ROUTE_TOL) -> bool:
    """<Pi+ (x) Pi+> = <Pi- (x) Pi->, both real and strictly positive."""
    scale = max(1.0, abs(plus_plus))
    return (
        abs(plus_plus - minus_minus) <= tol * scale
        and abs(plus_plus.imag) <= tol * scale
        and abs(minus_minus.imag) <= tol * scale
        and plus_plus.real > 0.0
        and minus_minus.real > 0.0
    )


def _same_half_dim(state_half: int, *cfgs: PseudospinConfig) -> None:
    for cfg in cfgs:
        if cfg.half_dim != state_half:
            raise DimensionMismatch(
                f"config {cfg.label!r} has half_dim {cfg.half_dim}, state needs {state_half}"
            )


def contract(state: TmsvState, a: np.ndarray, b: np.ndarray) -> complex:
    """<zeta| A (x) B |zeta> = sum_kl lam_k lam_l A_kl B_kl."""
    if a.shape != (state.dim, state.dim) or b.shape != a.shape:
        raise DimensionMismatch(f"operators {a.shape}, {b.shape} vs state dim {state.dim}")
    return kernels.pair_sum(state.lam, state.lam, a, b)


def correlation_tensor(state: TmsvState, set1: OperatorSet, set2: OperatorSet | None = None) -> CorrelationTensor:
    """Full 3x3 tensor from explicit operator matrices."""
    set2 = set1 if set2 is None else set2
    ops1 = (set1.px, set1.py, set1.pz)
    ops2 = (set2.px, set2.py, set2.pz)
    k = np.array([[contract(state, a, b).real for b in ops2] for a in ops1])
    return CorrelationTensor(k)


def plus_plus(state: TmsvState, cfg1: PseudospinConfig, cfg2: PseudospinConfig | None = None) -> complex:
    """<Pi_+^(1) (x) Pi_+^(2)> = sum_nm lam_2n lam_2m+1 u1[n, m] u2[n, m]."""
    cfg2 = cfg1 if cfg2 is None else cfg2
    _same_half_dim(state.dim // 2, cfg1, cfg2)
    return kernels.pair_sum(state.even, state.odd, cfg1.u, cfg2.u)


def tensor_from_configs(state: TmsvState, cfg1: PseudospinConfig, cfg2: PseudospinConfig | None = None) -> CorrelationTensor:
    """Same tensor as :func:`correlation_tensor` without building N x N operators.

    With P = <Pi+ (x) Pi+> (and <Pi- (x) Pi-> = conj P, cross terms zero):
    k_xx = 2 Re P, k_yy = -2 Re P, k_xy = k_yx = 2 Im P, k_zz = sum lam^2.
    """
    p = plus_plus(state, cfg1, cfg2)
    k = np.zeros((3, 3))
    k[0, 0] = 2.0 * p.real
    k[1, 1] = -2.0 * p.real
    k[0, 1] = k[1, 0] = 2.0 * p.imag
    k[2, 2] = state.norm2
    return CorrelationTensor(k)


def f_direct(state: TmsvState, cfg1: PseudospinConfig, cfg2: PseudospinConfig | None = None, tol: float = ROUTE_TOL) -> FResult:
    cfg2 = cfg1 if cfg2 is None else cfg2
    pp = plus_plus(state, cfg1, cfg2)
    _same_half_dim(state.dim // 2, cfg1, cfg2)
    # <Pi- (x) Pi-> evaluated separately from the conjugated operators
    mm = kernels.pair_sum(state.odd, state.even, cfg1.u.conj().T, cfg2.u.conj().T)
    total = pp + mm
    return FResult(float(total.real), pp, mm, condition15(pp, mm, tol), "direct", abs(total.imag))


def _trace_product(rho: np.ndarray, a: np.ndarray, b: np.ndarray) -> complex:
    """Tr(rho a rho b) for diagonal rho without forming the products."""
    return complex(np.einsum("n,nm,m,mn->", rho, a, rho, b))


def f_trace(rho: ReducedDensity, cfg1: PseudospinConfig, cfg2: PseudospinConfig | None = None, tol: float = ROUTE_TOL) -> FResult:
    """General half-sum; equals sinh(2 zeta) Tr(rho U1 rho U2) when <Pi+ (x) Pi+> = <Pi- (x) Pi-> > 0."""
    cfg2 = cfg1 if cfg2 is None else cfg2
    _same_half_dim(rho.half_dim, cfg1, cfg2)
    u1 = cfg1.u
    u2 = cfg2.u.T
    pref = rho.prefactor
    pp = pref * _trace_product(rho.rho, u1, u2)
    mm = pref * _trace_product(rho.rho, u1.conj().T, u2.conj().T)
    total = pp + mm
    return FResult(float(total.real), pp, mm, condition15(pp, mm, tol), "trace", abs(total.imag))


def g_pm(q, qp, zeta: float, sign: int):
    """Position-space amplitude <q q'|S(sign * zeta)|00>."""
    c2, t2 = math.cosh(2 * zeta), math.tanh(2 * zeta)
    return np.exp(-0.5 * (q * q + qp * qp - sign * 2.0 * q * qp * t2) * c2) / math.sqrt(math.pi)


def position_integral_quadrature(zeta: float, quad: QuadratureSpec) -> tuple[float, int]:
    # the g+ ridge runs along q = q' out to ~4.5 e^zeta and is ~e^-zeta wide
    grow = math.exp(zeta)
    upper = quad.upper if quad.upper is not None else 4.5 * grow + 2.0
    nodes = quad.nodes if quad.nodes is not None else int(math.ceil(3.0 * upper * grow)) + 64
    return upper, nodes


def f_position_integral(zeta: float, quad: QuadratureSpec = QuadratureSpec(), check: bool = True) -> float:
    """F = 2 int_0^Q int_0^Q (g+^2 - g-^2) dq dq' by tensor Gauss-Legendre."""
    zeta = check_zeta(zeta)
    upper, nodes = position_integral_quadrature(zeta, quad)
    q, w = gauss_legendre(nodes, 0.0, upper)
    c2, s2 = math.cosh(2 * zeta), math.sinh(2 * zeta)
    total = 0.0
    for start in range(0, nodes, 512):
        qa = q[start : start + 512, None]
        base = -(qa * qa + q[None, :] ** 2) * c2
        cross = 2.0 * s2 * qa * q[None, :]
        # g+^2 - g-^2 = (e^{cross} - e^{-cross}) e^{base} / pi
        diff = (np.exp(base + cross) - np.exp(base - cross)) / math.pi
        total += float(w[start : start + 512] @ diff @ w)
    f = 2.0 * total
    if check:
        ref = f_closed(zeta, "position")
        if abs(f - ref) > quad.tol:
            raise QuadratureInsufficient(
                f"position integral {f:.12g} differs from closed form {ref:.12g} by {abs(f - ref):.2e} > {quad.tol:.1e}"
            )
    return f


def f_closed(zeta: float, which: str) -> float:
    zeta = check_zeta(zeta)
    if which == "position":
        return 2.0 / math.pi * math.atan(math.sinh(2 * zeta))
    if which == "number":
        return math.tanh(2 * zeta)
    if which == "alt-phase":
        t2 = math.tanh(zeta) ** 2
        return math.sinh(2 * zeta) * (1.0 - t2) ** 2 / (1.0 + t2 * t2)
    raise UnknownTag(f"no closed form for {which!r}; choose from {', '.join(CLOSED_FORMS)}")


__all__ = [
    "CorrelationTensor",
    "FResult",
    "DEFAULT_QUAD_TOL",
    "condition15",
    "contract",
    "correlation_tensor",
    "tensor_from_configs",
    "plus_plus",
    "f_direct",
    "f_trace",
    "f_position_integral",
    "f_closed",
    "g_pm",
]
