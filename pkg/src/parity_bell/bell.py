"""CHSH optimization over orientations and over configurational unitaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .correlations import CorrelationTensor, f_direct, f_trace
from .errors import BoundExceeded, GridTooCoarse
from .fock import ReducedDensity, check_zeta, reduced_density, tmsv_state, truncation_for, DEFAULT_TAIL_TOL
from .pseudospin import PseudospinConfig, alt_phase, phase_config

TSIRELSON = 2.0 * math.sqrt(2.0)
SEARCH_TOL = 1e-8
BOUND_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class BellSetting:
    n: np.ndarray
    n_prime: np.ndarray
    m: np.ndarray
    m_prime: np.ndarray

    def __post_init__(self):
        for name in ("n", "n_prime", "m", "m_prime"):
            v = np.array(getattr(self, name), dtype=np.float64)
            if v.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"{name} is not a unit vector (norm {np.linalg.norm(v)!r})")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def from_angles(cls, angles) -> BellSetting:
        """Four (polar, azimuth) pairs, in the order n, n', m, m'."""
        return cls(*_spherical(np.asarray(angles, dtype=np.float64).reshape(4, 2)))

    def as_array(self) -> np.ndarray:
        return np.stack([self.n, self.n_prime, self.m, self.m_prime])

    def as_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("n", "n_prime", "m", "m_prime")}


def _spherical(angles: np.ndarray) -> list[np.ndarray]:
    th, ph = angles[:, 0], angles[:, 1]
    vecs = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    return [v / np.linalg.norm(v) for v in vecs]


def _angles(vecs: np.ndarray) -> np.ndarray:
    z = np.clip(vecs[:, 2], -1.0, 1.0)
    return np.stack([np.arccos(z), np.arctan2(vecs[:, 1], vecs[:, 0])], axis=1)


@dataclass(frozen=True, eq=False)
class BellOutcome:
    value: float
    setting: BellSetting
    f_used: float
    method: str

    @property
    def violates(self) -> bool:
        return self.value > 2.0


def bell_value(k: CorrelationTensor, s: BellSetting) -> float:
    """<B> = n.K m + n'.K m + n.K m' - n'.K m'."""
    kk = k.k
    return float(s.n @ kk @ s.m + s.n_prime @ kk @ s.m + s.n @ kk @ s.m_prime - s.n_prime @ kk @ s.m_prime)


def _orthonormal_pair(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    trial = np.eye(3)[int(np.argmin(np.abs(a)))]
    b = np.cross(a, trial)
    b /= np.linalg.norm(b)
    return b, np.cross(a, b)


def horodecki_max(k: CorrelationTensor) -> BellOutcome:
    """Maximal CHSH value 2 sqrt(s1 + s2) from the top eigenvalues of K^T K.

    The setting is built from the two dominant right singular directions
    c, d: m, m' = cos(t) c +- sin(t) d with tan(t) = sqrt(s2 / s1), and n, n'
    along K c and K d.
    """
    kk = k.k
    evals, evecs = np.linalg.eigh(kk.T @ kk)
    order = np.argsort(evals)[::-1]
    s1, s2 = (max(float(evals[i]), 0.0) for i in order[:2])
    c, d = evecs[:, order[0]], evecs[:, order[1]]
    value = 2.0 * math.sqrt(s1 + s2)

    theta = math.atan2(math.sqrt(s2), math.sqrt(s1))
    m = math.cos(theta) * c + math.sin(theta) * d
    mp = math.cos(theta) * c - math.sin(theta) * d
    kc, kd = kk @ c, kk @ d
    if np.linalg.norm(kc) > 0:
        n = kc / np.linalg.norm(kc)
    else:
        n = c
    if np.linalg.norm(kd) > 0:
        np_ = kd / np.linalg.norm(kd)
    else:
        np_ = _orthonormal_pair(n)[0]
    setting = BellSetting(n, np_, m / np.linalg.norm(m), mp / np.linalg.norm(mp))
    return BellOutcome(value, setting, float(kk[0, 0]), "horodecki")


def _compass(k: np.ndarray, angles: np.ndarray, step: float = 0.05, min_step: float = 1e-10) -> tuple[float, np.ndarray]:
    """Coordinate-wise polar/azimuth refinement with step halving."""
    angles = angles.copy()

    def value(a):
        n, n2, m, m2 = _spherical(a.reshape(4, 2))
        return float(n @ k @ (m + m2) + n2 @ k @ (m - m2))

    flat = angles.ravel()
    best = value(flat)
    while step >= min_step:
        improved = False
        for i in range(flat.size):
            for sgn in (1.0, -1.0):
                flat[i] += sgn * step
                val = value(flat)
                if val > best:
                    best = val
                    improved = True
                    break
                flat[i] -= sgn * step
        if not improved:
            step *= 0.5
    return best, flat.reshape(4, 2)


def direct_search(k: CorrelationTensor, restarts: int = 8, seed: int = 0) -> BellOutcome:
    """Seeded multi-start ascent over four unrestricted unit vectors.

    Each start is driven to a stationary point by exact alternating
    updates of the four vectors, then polished by compass steps in the
    polar and azimuthal angles down to a 1e-10 step. Ties go to the lowest
    restart index.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(restarts, 4, 3))
    starts /= np.linalg.norm(starts, axis=2, keepdims=True)
    kk = np.ascontiguousarray(k.k)
    _, settings = kernels.chsh_ascent(kk, starts)

    best_val, best_angles = -math.inf, None
    for r in range(restarts):
        val, ang = _compass(kk, _angles(settings[r]))
        if val > best_val:
            best_val, best_angles = val, ang
    setting = BellSetting.from_angles(best_angles)
    return BellOutcome(bell_value(k, setting), setting, float(kk[0, 0]), "direct-search")


def orientational_optimum(f: float) -> float:
    """2 sqrt(1 + F^2), the optimum for K = diag(F, -F, 1)."""
    return 2.0 * math.sqrt(1.0 + f * f)


@dataclass(frozen=True, eq=False)
class ConfigSearchResult:
    best_f: float
    best_config: PseudospinConfig
    trials: int
    seed: int | None
    bound: float
    family: str = ""
    analytic_f: float | None = None
    probes: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.bound - self.best_f

    def as_dict(self) -> dict:
        out = {
            "family": self.family,
            "best_f": self.best_f,
            "bound": self.bound,
            "gap": self.gap,
            "trials": self.trials,
            "seed": self.seed,
            "best_config_label": self.best_config.label,
        }
        if self.analytic_f is not None:
            out["analytic_f"] = self.analytic_f
        if self.best_config.phases is not None:
            out["best_phases"] = self.best_config.phases.tolist()
        if self.probes:
            out["probes"] = dict(self.probes)
        return out


def _check_bound(best_f: float, bound: float, slack: float) -> None:
    if best_f > bound + slack:
        raise BoundExceeded(f"best F {best_f!r} exceeds tanh(2 zeta) = {bound!r} by more than {slack:.0e}")


def optimize_phases(rho: ReducedDensity, grid: int = 64) -> ConfigSearchResult:
    """Grid search over u = diag(exp(i theta_n)) shared by both channels.

    On this family F = sinh(2 zeta) sum_n rho_n^2 cos(2 theta_n), which is
    separable, so each phase is maximized over the grid independently; the
    winner is re-evaluated through the trace route.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    thetas = 2.0 * math.pi * np.arange(grid) / grid
    gains = np.cos(2.0 * thetas)
    # argmax returns the first maximum, i.e. the lowest grid index on ties
    weights = rho.rho**2
    best_idx = np.argmax(weights[:, None] * gains[None, :], axis=1)
    best_cfg = phase_config(thetas[best_idx])
    best_f = f_trace(rho, best_cfg).f

    alt = f_trace(rho, alt_phase(rho.half_dim)).f
    analytic = 2.0 * rho.prefactor * float(weights.sum())
    bound = math.tanh(2.0 * rho.zeta)
    _check_bound(best_f, bound, 1e-12)
    return ConfigSearchResult(
        best_f, best_cfg, grid, None, bound, "diagonal-phase", analytic, {"alt-phase": alt}
    )


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_unitary_search(
    rho: ReducedDensity,
    trials: int,
    seed: int,
    include_identity: bool = False,
    independent: bool = False,
) -> ConfigSearchResult:
    """Best F over seeded Haar unitaries, evaluated by the general trace half-sum.

    With ``independent`` the two channels draw separate unitaries; otherwise
    both use the same one. ``include_identity`` adds u = I as trial 0.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n = rho.half_dim
    best_f, best_cfg = -math.inf, None
    candidates = []
    if include_identity:
        candidates.append(None)
    candidates.extend(range(trials))
    for c in candidates:
        if c is None:
            cfg1 = cfg2 = PseudospinConfig(np.eye(n), "custom")
        else:
            cfg1 = PseudospinConfig(haar_unitary(n, rng), "custom")
            cfg2 = PseudospinConfig(haar_unitary(n, rng), "custom") if independent else cfg1
        f = f_trace(rho, cfg1, cfg2).f
        if f > best_f:
            best_f, best_cfg = f, cfg1
    bound = math.tanh(2.0 * rho.zeta)
    _check_bound(best_f, bound, BOUND_SLACK)
    return ConfigSearchResult(best_f, best_cfg, len(candidates), seed, bound, "random-unitary")


@dataclass(frozen=True, eq=False)
class NonmonotonicityReport:
    zeta: np.ndarray
    f: np.ndarray
    entropy: np.ndarray
    bell: np.ndarray
    argmax: int
    positive: bool
    interior_max: bool
    decay_ratio: float
    entropy_increasing: bool
    violation_interior: bool
    descending_pair: tuple[int, int] | None

    @property
    def f_max(self) -> float:
        return float(self.f[self.argmax])

    @property
    def zeta_at_max(self) -> float:
        return float(self.zeta[self.argmax])

    @property
    def certified(self) -> bool:
        return (
            self.positive
            and self.interior_max
            and self.decay_ratio > 10.0
            and self.entropy_increasing
            and self.violation_interior
            and self.descending_pair is not None
        )


def nonmonotonicity_certificate(zeta_grid, tail_tol: float = DEFAULT_TAIL_TOL) -> NonmonotonicityReport:
    """Alt-phase F along a zeta grid through the matrix route.

    Certifies F > 0 throughout, an interior maximum, a fall by more than a
    factor 10 to the right edge, Bell value above 2 on the interior, and a
    strictly increasing Schmidt entropy over the same grid.
    """
    zs = np.asarray(zeta_grid, dtype=np.float64)
    if zs.ndim != 1 or zs.size < 50:
        raise GridTooCoarse(f"need at least 50 grid points, got {zs.size}")
    if np.any(np.diff(zs) <= 0):
        raise ValueError("zeta grid must be strictly increasing")
    if zs[0] > 0.05 or zs[-1] < 3.0:
        raise ValueError("zeta grid must span at least [0.05, 3.0]")
    for z in zs:
        check_zeta(z)

    f = np.empty(zs.size)
    ent = np.empty(zs.size)
    cache: dict[int, PseudospinConfig] = {}
    for i, z in enumerate(zs):
        state = tmsv_state(z, truncation_for(z, tail_tol))
        h = state.dim // 2
        cfg = cache.setdefault(h, alt_phase(h))
        f[i] = f_direct(state, cfg).f
        ent[i] = state.schmidt_entropy()
    bell = 2.0 * np.sqrt(1.0 + f * f)
    k = int(np.argmax(f))
    interior = slice(1, zs.size - 1)

    pair = None
    for j in range(k + 1, zs.size):
        if 0.0 < f[j] < f[k]:
            pair = (k, j)
            break
    return NonmonotonicityReport(
        zeta=zs,
        f=f,
        entropy=ent,
        bell=bell,
        argmax=k,
        positive=bool(np.all(f > 0.0)),
        interior_max=0 < k < zs.size - 1,
        decay_ratio=float(f[k] / f[-1]) if f[-1] > 0 else math.inf,
        entropy_increasing=bool(np.all(np.diff(ent) > 0.0)),
        violation_interior=bool(np.all(bell[interior] > 2.0)),
        descending_pair=pair,
    )


def schmidt_entropy(zeta: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    return tmsv_state(zeta, truncation_for(zeta, tail_tol)).schmidt_entropy()


def phase_search_at(zeta: float, grid: int = 64, tail_tol: float = DEFAULT_TAIL_TOL) -> ConfigSearchResult:
    return optimize_phases(reduced_density(tmsv_state(zeta, truncation_for(zeta, tail_tol))), grid)
