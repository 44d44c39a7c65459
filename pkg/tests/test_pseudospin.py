import math

import numpy as np
import pytest
from scipy.integrate import quad

from parity_bell.errors import NonUnitaryConfig, QuadratureInsufficient
from parity_bell.pseudospin import (
    PseudospinConfig,
    alt_phase,
    conjugator,
    custom_config,
    half_line_overlaps,
    hermite_psi,
    named_config,
    number_config,
    operator_set,
    parity,
    phase_config,
    position_config,
    verify_su2,
)
from parity_bell.quadrature import QuadratureSpec


def explicit_number_x(dim):
    sx = np.zeros((dim, dim))
    for k in range(0, dim, 2):
        sx[k, k + 1] = sx[k + 1, k] = 1.0
    return sx


def test_number_config_is_identity():
    np.testing.assert_array_equal(number_config(5).u, np.eye(5))


def test_number_x_matches_explicit_form():
    ops = operator_set(number_config(6))
    np.testing.assert_array_equal(ops.px, explicit_number_x(12))
    # Pi_y = -i(Pi_+ - Pi_-): <2n|Pi_y|2n+1> = -i
    assert ops.py[0, 1] == -1j and ops.py[1, 0] == 1j


def test_parity_shared_across_configs():
    z = parity(8)
    for cfg in (number_config(4), alt_phase(4), position_config(4)):
        np.testing.assert_array_equal(operator_set(cfg).pz, z)


def test_alt_phase_entries_exact():
    u = alt_phase(6).u
    np.testing.assert_array_equal(np.diag(u), [1, -1j, -1, 1j, 1, -1j])
    np.testing.assert_allclose(alt_phase(6).phases, -np.pi / 2 * np.arange(6))


def test_zero_phases_equal_number():
    np.testing.assert_array_equal(phase_config(np.zeros(7)).u, number_config(7).u)


@pytest.mark.parametrize("make", [number_config, alt_phase, lambda h: phase_config(np.linspace(0, 3, h))])
def test_algebra_exact_for_diagonal_families(make):
    rep = verify_su2(operator_set(make(10)), tol=1e-14)
    assert rep.passed
    # diagonal U closes the algebra on the full truncated space too
    assert rep.edge_residual < 1e-14


def test_algebra_for_random_unitary(rng):
    z = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    q, _ = np.linalg.qr(z)
    rep = verify_su2(operator_set(custom_config(q)), tol=1e-12)
    assert rep.passed and rep.edge_residual < 1e-12


def test_corrupted_config_is_caught():
    bad = PseudospinConfig(1.1 * np.eye(6), "custom")
    with pytest.raises(NonUnitaryConfig):
        operator_set(bad)
    rep = verify_su2(operator_set(bad, check=False), tol=1e-8)
    assert not rep.passed
    assert rep.max_square_residual == pytest.approx(1.1**2 - 1, abs=1e-12)


def test_custom_config_rejects_non_unitary():
    with pytest.raises(NonUnitaryConfig):
        custom_config(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_config_rejects_bad_shape_and_label():
    with pytest.raises(ValueError):
        PseudospinConfig(np.ones((2, 3)), "custom")
    with pytest.raises(ValueError):
        PseudospinConfig(np.eye(2), "banana")
    with pytest.raises(ValueError):
        named_config("banana", 4)


def test_config_is_read_only():
    with pytest.raises(ValueError):
        number_config(3).u[0, 0] = 2


def test_conjugator_maps_raising_operators():
    src = operator_set(number_config(4))
    dst = operator_set(alt_phase(4))
    w = conjugator(src, dst)
    np.testing.assert_allclose(w @ w.conj().T, np.eye(8), atol=1e-14)
    np.testing.assert_allclose(w @ src.plus @ w.conj().T, dst.plus, atol=1e-14)
    np.testing.assert_allclose(w @ src.pz @ w.conj().T, dst.pz, atol=1e-14)


def test_hermite_ground_state_origin():
    assert hermite_psi(0, 0.0) == pytest.approx(math.pi ** -0.25, abs=1e-15)


@pytest.mark.parametrize("n", [0, 3, 10])
def test_hermite_normalized(n):
    val, _ = quad(lambda q: hermite_psi(n, q) ** 2, -np.inf, np.inf)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_hermite_parity():
    q = np.linspace(0.1, 4, 9)
    np.testing.assert_allclose(hermite_psi(5, -q), -hermite_psi(5, q), atol=1e-15)
    np.testing.assert_allclose(hermite_psi(4, -q), hermite_psi(4, q), atol=1e-15)


def test_position_leading_entry():
    assert position_config(8).u[0, 0].real == pytest.approx(math.sqrt(2 / math.pi), abs=1e-12)


def test_position_entries_by_adaptive_quadrature():
    u = position_config(4).u
    for n, m in [(0, 1), (1, 0), (2, 3)]:
        val, _ = quad(lambda q: 2 * hermite_psi(2 * n, q) * hermite_psi(2 * m + 1, q), 0, np.inf, epsabs=1e-13)
        assert u[n, m].real == pytest.approx(val, abs=1e-11)
    assert np.abs(u.imag).max() == 0.0


def test_position_gram_certificate():
    _, ge, go = half_line_overlaps(32)
    np.testing.assert_allclose(ge, np.eye(32), atol=1e-10)
    np.testing.assert_allclose(go, np.eye(32), atol=1e-10)


def test_position_rows_approach_unit_norm():
    u = position_config(256).u
    rows = np.linalg.norm(u, axis=1)
    assert np.all(rows <= 1 + 1e-10)
    # slow power-law convergence towards unit rows as the block grows
    small = np.linalg.norm(position_config(64).u, axis=1)
    assert rows[0] > small[0] > 0.97


def test_position_is_a_contraction():
    cfg = position_config(64)
    assert cfg.section
    assert cfg.contraction_excess() < 1e-10
    cfg.check()


def test_position_quadrature_too_coarse():
    with pytest.raises(QuadratureInsufficient):
        position_config(32, QuadratureSpec(nodes=20))


def test_leading_block():
    cfg = position_config(16)
    np.testing.assert_array_equal(cfg.leading(4).u, cfg.u[:4, :4])
    assert cfg.leading(4).section
    assert not alt_phase(8).leading(3).section
    with pytest.raises(ValueError):
        cfg.leading(17)
