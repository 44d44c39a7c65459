"""Parity pseudospin operator families.

Every family shares the parity Pi_z = I_E - I_O and differs only in the
half-space unitary ``u`` with ``u[n, m] = <2n|Pi_+|2m+1>``. From it

    Pi_+ = sum_nm u[n, m] |2n><2m+1|,   Pi_- = Pi_+^dagger,
    Pi_x = Pi_+ + Pi_-,                 Pi_y = -i (Pi_+ - Pi_-).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import NonUnitaryConfig, QuadratureInsufficient
from .quadrature import QuadratureSpec, gauss_legendre, turning_point

LABELS = ("number", "position", "alt-phase", "diagonal-phase", "custom")
NAMED = ("number", "position", "alt-phase")
DEFAULT_UNITARITY_TOL = 1e-8
_NODE_CHUNK = 2048


def _frozen(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PseudospinConfig:
    """Configurational unitary on the half-index space plus a label.

    ``section`` marks a finite leading block of an infinite unitary (the
    position family). Such a block is only a contraction, so the
    unitarity requirement is replaced by ``||u||_2 <= 1``.
    """

    u: np.ndarray
    label: str
    section: bool = False
    quadrature_residual: float | None = None
    phases: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        u = np.asarray(self.u)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
            raise ValueError(f"config matrix must be square and non-empty, got shape {u.shape}")
        if self.label not in LABELS:
            raise ValueError(f"unknown config label {self.label!r}")
        object.__setattr__(self, "u", _frozen(u))

    @property
    def half_dim(self) -> int:
        return self.u.shape[0]

    @property
    def dim(self) -> int:
        return 2 * self.half_dim

    def unitarity_residual(self, interior: bool = False) -> float:
        """max |U U^dagger - I|, optionally without the last row and column."""
        g = self.u @ self.u.conj().T - np.eye(self.half_dim)
        if interior:
            g = g[:-1, :-1]
        return float(np.abs(g).max()) if g.size else 0.0

    def contraction_excess(self) -> float:
        return max(0.0, float(np.linalg.norm(self.u, 2)) - 1.0)

    def check(self, tol: float = DEFAULT_UNITARITY_TOL) -> None:
        if self.section:
            excess = self.contraction_excess()
            if excess > tol:
                raise NonUnitaryConfig(f"{self.label} section is not a contraction (excess {excess:.3e})")
            return
        res = self.unitarity_residual()
        if not res < tol:
            raise NonUnitaryConfig(f"{self.label} config is not unitary (residual {res:.3e} >= {tol:.1e})")

    def leading(self, half_dim: int) -> PseudospinConfig:
        """The leading ``half_dim`` block, for running smaller truncations."""
        if half_dim > self.half_dim:
            raise ValueError(f"cannot extend a {self.half_dim}-block to {half_dim}")
        if half_dim == self.half_dim:
            return self
        block = self.u[:half_dim, :half_dim]
        diagonal = not np.any(block - np.diag(np.diag(block)))
        return PseudospinConfig(
            block,
            self.label,
            section=self.section or not diagonal,
            quadrature_residual=self.quadrature_residual,
            phases=None if self.phases is None else self.phases[:half_dim],
        )


def number_config(half_dim: int) -> PseudospinConfig:
    if half_dim < 1:
        raise ValueError("half_dim must be >= 1")
    return PseudospinConfig(np.eye(half_dim), "number")


def phase_config(phases) -> PseudospinConfig:
    phases = np.asarray(phases, dtype=np.float64)
    if phases.ndim != 1 or phases.size < 1:
        raise ValueError("phases must be a non-empty vector")
    return PseudospinConfig(np.diag(np.exp(1j * phases)), "diagonal-phase", phases=phases)


_QUARTER_TURNS = np.array([1, -1j, -1, 1j])


def alt_phase(half_dim: int) -> PseudospinConfig:
    """u = diag((-i)^n), phases -n pi/2; entries are exact, not via exp()."""
    if half_dim < 1:
        raise ValueError("half_dim must be >= 1")
    n = np.arange(half_dim)
    return PseudospinConfig(np.diag(_QUARTER_TURNS[n % 4]), "alt-phase", phases=-0.5 * np.pi * n)


def custom_config(u, label: str = "custom", tol: float = DEFAULT_UNITARITY_TOL) -> PseudospinConfig:
    cfg = PseudospinConfig(np.asarray(u, dtype=np.complex128), label)
    cfg.check(tol)
    return cfg


def hermite_psi(n: int, q):
    """Normalized oscillator eigenfunction psi_n(q); scalar or array ``q``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    arr = np.atleast_1d(np.asarray(q, dtype=np.float64))
    vals = kernels.hermite_table(n + 1, arr.ravel())[n].reshape(arr.shape)
    return float(vals[0]) if np.ndim(q) == 0 else vals


def position_quadrature(half_dim: int, quad: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    dim = 2 * half_dim
    upper = quad.upper if quad.upper is not None else turning_point(dim) * math.sqrt(2.0) + 6.0
    if upper <= turning_point(dim):
        raise QuadratureInsufficient(
            f"upper limit {upper:.3f} does not pass the turning point {turning_point(dim):.3f} of level {dim}"
        )
    nodes = quad.nodes if quad.nodes is not None else 2 * dim + 64
    return gauss_legendre(nodes, 0.0, upper)


def half_line_overlaps(half_dim: int, quad: QuadratureSpec = QuadratureSpec()):
    """Return (u, gram_even, gram_odd) of doubled half-line integrals.

    u[n, m] = 2 int_0^inf psi_2n psi_2m+1, and the Gram matrices use the
    same rule on even-even and odd-odd pairs, which must be the identity.
    """
    q, w = position_quadrature(half_dim, quad)
    dim = 2 * half_dim
    u = np.zeros((half_dim, half_dim))
    ge = np.zeros((half_dim, half_dim))
    go = np.zeros((half_dim, half_dim))
    for start in range(0, q.size, _NODE_CHUNK):
        sl = slice(start, start + _NODE_CHUNK)
        table = kernels.hermite_table(dim, q[sl])
        ev, od = table[0::2], table[1::2]
        ew = ev * (2.0 * w[sl])
        u += ew @ od.T
        ge += ew @ ev.T
        go += (od * (2.0 * w[sl])) @ od.T
    return u, ge, go


@lru_cache(maxsize=8)
def _position_cached(half_dim: int, quad: QuadratureSpec) -> PseudospinConfig:
    u, ge, go = half_line_overlaps(half_dim, quad)
    eye = np.eye(half_dim)
    resid = float(max(np.abs(ge - eye).max(), np.abs(go - eye).max()))
    if not resid < quad.tol:
        raise QuadratureInsufficient(
            f"half-line orthonormality residual {resid:.3e} >= {quad.tol:.1e} "
            f"(half_dim={half_dim}, nodes={quad.nodes}, upper={quad.upper})"
        )
    return PseudospinConfig(u, "position", section=True, quadrature_residual=resid)


def position_config(half_dim: int, quad: QuadratureSpec = QuadratureSpec()) -> PseudospinConfig:
    """Half-line Hermite overlaps, u[n, m] = 2 int_0^inf psi_2n psi_2m+1 dq.

    The result is the leading block of an infinite real orthogonal matrix.
    Quadrature sufficiency is certified by the orthonormality of the
    doubled half-line even and odd functions under the same rule.
    """
    if half_dim < 1:
        raise ValueError("half_dim must be >= 1")
    return _position_cached(int(half_dim), quad)


def named_config(label: str, half_dim: int, quad: QuadratureSpec = QuadratureSpec()) -> PseudospinConfig:
    if label == "number":
        return number_config(half_dim)
    if label == "position":
        return position_config(half_dim, quad)
    if label == "alt-phase":
        return alt_phase(half_dim)
    raise ValueError(f"no named config {label!r}; choose from {', '.join(NAMED)}")


@dataclass(frozen=True, eq=False)
class OperatorSet:
    px: np.ndarray
    py: np.ndarray
    pz: np.ndarray
    config: PseudospinConfig

    @property
    def dim(self) -> int:
        return self.pz.shape[0]

    @property
    def plus(self) -> np.ndarray:
        return 0.5 * (self.px + 1j * self.py)

    @property
    def minus(self) -> np.ndarray:
        return 0.5 * (self.px - 1j * self.py)


def parity(dim: int) -> np.ndarray:
    return np.diag(np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)).astype(np.complex128)


def raising(config: PseudospinConfig) -> np.ndarray:
    """Pi_+ on the full truncated space."""
    dim = config.dim
    plus = np.zeros((dim, dim), dtype=np.complex128)
    plus[0::2, 1::2] = config.u
    return plus


def operator_set(config: PseudospinConfig, tol: float = DEFAULT_UNITARITY_TOL, check: bool = True) -> OperatorSet:
    if check:
        config.check(tol)
    plus = raising(config)
    minus = plus.conj().T
    ops = [plus + minus, -1j * (plus - minus), parity(config.dim)]
    for op in ops:
        op.setflags(write=False)
    return OperatorSet(*ops, config)


@dataclass(frozen=True)
class AlgebraReport:
    max_square_residual: float
    max_commutator_residual: float
    unitarity_residual: float
    edge_residual: float
    tol: float
    label: str = ""

    @property
    def passed(self) -> bool:
        return (
            self.max_square_residual < self.tol
            and self.max_commutator_residual < self.tol
            and self.unitarity_residual < self.tol
        )

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "max_square_residual": self.max_square_residual,
            "max_commutator_residual": self.max_commutator_residual,
            "unitarity_residual": self.unitarity_residual,
            "edge_residual": self.edge_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def _max_abs(m: np.ndarray) -> float:
    return float(np.abs(m).max()) if m.size else 0.0


def _residuals(opset: OperatorSet, keep: int) -> tuple[float, float, float]:
    x, y, z = opset.px, opset.py, opset.pz
    dim = opset.dim
    eye = np.eye(dim)
    even = np.diag((np.arange(dim) % 2 == 0).astype(np.float64))
    odd = eye - even
    blk = (slice(0, keep), slice(0, keep))

    squares = max(_max_abs((op @ op - eye)[blk]) for op in (x, y, z))
    comms = max(
        _max_abs((a @ b - b @ a - 2j * c)[blk])
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y))
    )
    plus, minus = opset.plus, opset.minus
    unit = max(_max_abs((plus @ minus - even)[blk]), _max_abs((minus @ plus - odd)[blk]))
    return squares, comms, unit


def verify_su2(opset: OperatorSet, tol: float = DEFAULT_UNITARITY_TOL) -> AlgebraReport:
    """Pauli-normalized SU(2) relations, unit squares and the Pi_+- projectors.

    Residuals are taken on the interior block, i.e. without the final
    even/odd level pair; the full-space maximum is reported as
    ``edge_residual``.
    """
    interior = max(opset.dim - 2, 0)
    sq, cm, un = _residuals(opset, interior)
    edge = max(_residuals(opset, opset.dim))
    return AlgebraReport(sq, cm, un, edge, tol, opset.config.label)


def conjugator(src: OperatorSet, dst: OperatorSet) -> np.ndarray:
    """W = I_E + S_- Pi_+ with S = ``dst`` and Pi = ``src``; W Pi_+ W^dag = S_+."""
    dim = src.dim
    even = np.diag((np.arange(dim) % 2 == 0).astype(np.complex128))
    return even + dst.minus @ src.plus
