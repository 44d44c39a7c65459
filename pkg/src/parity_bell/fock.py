"""Two-mode squeezed vacuum in a truncated Fock basis.

The state is kept in Schmidt form, ``sum_n lam_n |n n>``, so every
downstream contraction is O(N^2) in the per-mode dimension ``N``. The
two-mode vector produced by :func:`squeeze_oracle` is only used to check
that form independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CapExceeded, DimensionTooLarge, InvalidTolerance, TruncationError

DEFAULT_TAIL_TOL = 1e-12
ZETA_CAP = 3.0
ORACLE_MAX_DIM = 64


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def check_zeta(zeta: float) -> float:
    zeta = float(zeta)
    if not math.isfinite(zeta):
        raise ValueError(f"zeta must be finite, got {zeta}")
    if zeta < 0.0:
        raise ValueError(f"zeta must be >= 0, got {zeta}")
    return zeta


@dataclass(frozen=True)
class FockTruncation:
    """Per-mode Fock cutoff: levels 0..dim-1, with dim even."""

    dim: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2 or self.dim % 2:
            raise ValueError(f"dim must be an even integer >= 2, got {self.dim}")
        if not self.tail_tol >= 0.0:
            raise InvalidTolerance(f"tail_tol must be >= 0, got {self.tail_tol}")

    @property
    def half_dim(self) -> int:
        return self.dim // 2


def tail_weight(zeta: float, dim: int) -> float:
    """Discarded Schmidt weight sum_{n>=dim} lam_n^2 = tanh(zeta)^(2 dim)."""
    t = math.tanh(zeta)
    if t == 0.0:
        return 0.0
    return math.exp(2 * dim * math.log(t))


def truncation_for(zeta: float, tail_tol: float = DEFAULT_TAIL_TOL, cap: float = ZETA_CAP) -> FockTruncation:
    """Smallest even cutoff whose discarded weight is below ``tail_tol``."""
    zeta = check_zeta(zeta)
    if not tail_tol > 0.0:
        raise InvalidTolerance(f"tail_tol must be > 0, got {tail_tol}")
    if zeta > cap:
        raise CapExceeded(f"zeta={zeta} exceeds the cap {cap}")
    t = math.tanh(zeta)
    if t == 0.0:
        return FockTruncation(2, tail_tol)
    dim = max(2, math.ceil(math.log(tail_tol) / (2.0 * math.log(t))))
    dim += dim % 2
    # guard the closed form against rounding at the boundary
    while tail_weight(zeta, dim) >= tail_tol:
        dim += 2
    while dim > 2 and tail_weight(zeta, dim - 2) < tail_tol:
        dim -= 2
    return FockTruncation(dim, tail_tol)


@dataclass(frozen=True, eq=False)
class TmsvState:
    """Schmidt coefficients lam_n = tanh(zeta)^n / cosh(zeta), n < dim."""

    zeta: float
    lam: np.ndarray
    trunc: FockTruncation

    @property
    def dim(self) -> int:
        return self.lam.size

    @property
    def even(self) -> np.ndarray:
        return self.lam[0::2]

    @property
    def odd(self) -> np.ndarray:
        return self.lam[1::2]

    @property
    def norm2(self) -> float:
        return float(self.lam @ self.lam)

    @property
    def deficit(self) -> float:
        """Weight lost to truncation (the state is never renormalized)."""
        return 1.0 - self.norm2

    def schmidt_entropy(self) -> float:
        p = self.lam**2
        p = p[p > 0.0]
        return float(-(p * np.log(p)).sum())

    def diagonal_vector(self) -> np.ndarray:
        """The state as an N x N amplitude array (only the diagonal is nonzero)."""
        return np.diag(self.lam).astype(np.complex128)


def _powers(t: float, exponents: np.ndarray) -> np.ndarray:
    if t == 0.0:
        return (exponents == 0).astype(np.float64)
    return np.exp(exponents * math.log(t))


def tmsv_state(zeta: float, trunc: FockTruncation | None = None) -> TmsvState:
    zeta = check_zeta(zeta)
    if trunc is None:
        trunc = truncation_for(zeta)
    tail = tail_weight(zeta, trunc.dim)
    if tail > 0.0 and not tail < trunc.tail_tol:
        raise TruncationError(
            f"dim={trunc.dim} discards weight {tail:.3e} >= tail_tol={trunc.tail_tol:.3e} at zeta={zeta}"
        )
    lam = _powers(math.tanh(zeta), np.arange(trunc.dim, dtype=np.float64)) / math.cosh(zeta)
    return TmsvState(zeta, _frozen(lam), trunc)


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    """Diagonal reduced-density weights rho_n = tanh^(2n)/cosh^2 on half-indices."""

    zeta: float
    rho: np.ndarray

    @property
    def half_dim(self) -> int:
        return self.rho.size

    @property
    def purity(self) -> float:
        return float(self.rho @ self.rho)

    @property
    def prefactor(self) -> float:
        """sinh(2 zeta) / 2, linking rho-products to even/odd lam-products."""
        return 0.5 * math.sinh(2.0 * self.zeta)


def reduced_density(state: TmsvState) -> ReducedDensity:
    t, c = math.tanh(state.zeta), math.cosh(state.zeta)
    rho = _powers(t * t, np.arange(state.dim // 2, dtype=np.float64)) / (c * c)
    red = ReducedDensity(state.zeta, _frozen(rho))
    lhs = red.prefactor * np.outer(rho, rho)
    rhs = np.outer(state.even, state.odd)
    if not np.allclose(lhs, rhs, rtol=1e-12, atol=0.0):
        raise AssertionError("reduced density inconsistent with Schmidt coefficients")
    return red


@dataclass(frozen=True, eq=False)
class TwoModeVector:
    """amp[n, m] = <n m|psi> on the truncated two-mode space."""

    amp: np.ndarray

    @property
    def dim(self) -> int:
        return self.amp.shape[0]

    def max_off_diagonal(self) -> float:
        off = self.amp - np.diag(np.diag(self.amp))
        return float(np.abs(off).max()) if off.size else 0.0


def ladder(dim: int) -> sp.csr_matrix:
    """Truncated annihilation operator on ``dim`` levels."""
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=np.float64)), 1, shape=(dim, dim), format="csr")


def expm_apply(gen: sp.spmatrix, vec: np.ndarray, tol: float = 1e-17) -> np.ndarray:
    """exp(gen) @ vec by Taylor series on sub-steps of unit generator norm."""
    norm = float(abs(gen).sum(axis=0).max()) if gen.nnz else 0.0
    steps = max(1, math.ceil(norm))
    gen = gen * (1.0 / steps)
    out = np.array(vec, dtype=np.float64 if np.isrealobj(vec) and np.isrealobj(gen.data) else np.complex128)
    for _ in range(steps):
        term = out.copy()
        acc = out.copy()
        k = 1
        while True:
            term = (gen @ term) / k
            acc += term
            k += 1
            if np.linalg.norm(term) <= tol * np.linalg.norm(acc) or k > 200:
                break
        out = acc
    return out


def squeeze_oracle(zeta: float, trunc: FockTruncation, max_dim: int = ORACLE_MAX_DIM) -> TwoModeVector:
    """S(zeta)|00> from the two-mode generator zeta (a^+ b^+ - a b), normalized."""
    zeta = check_zeta(zeta)
    n = trunc.dim
    if n > max_dim:
        raise DimensionTooLarge(f"oracle dim {n} exceeds limit {max_dim}")
    a = ladder(n)
    eye = sp.identity(n, format="csr")
    a1 = sp.kron(a, eye, format="csr")
    b1 = sp.kron(eye, a, format="csr")
    gen = zeta * (a1.T @ b1.T - a1 @ b1)
    vac = np.zeros(n * n)
    vac[0] = 1.0
    psi = expm_apply(gen.tocsr(), vac)
    psi /= np.linalg.norm(psi)
    return TwoModeVector(_frozen(psi.reshape(n, n).astype(np.complex128)))


def fidelity(vec: TwoModeVector, state: TmsvState) -> float:
    """|<oracle|schmidt>|^2, both normalized on the oracle's levels.

    A Schmidt state with more levels than the oracle is restricted to the
    oracle's cutoff first, so only the dynamics are compared.
    """
    if state.dim < vec.dim:
        raise ValueError(f"state has {state.dim} levels, oracle needs {vec.dim}")
    lam = state.lam[: vec.dim]
    overlap = np.vdot(vec.amp.diagonal(), lam)
    return float(abs(overlap) ** 2 / (np.vdot(vec.amp, vec.amp).real * (lam @ lam)))
