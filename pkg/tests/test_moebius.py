"""Vahlen maps: evaluation on the compactified plane, conformal weights,
composition/inversion, the Cayley transform, and the kernel covariance
identity."""
import dataclasses

import numpy as np
import pytest

from sphereglue.algebra import Multivector, reversion
from sphereglue.moebius import (
    INFINITY,
    SingularPointError,
    VahlenError,
    apply,
    cauchy_kernel_G,
    cayley,
    cayley_embed,
    cayley_embed_jacobian,
    compose,
    covariance_residual,
    identity_map,
    inverse,
    is_infinity,
    neck_inversion,
    pseudo_determinant,
    translation_map,
    weight_J,
)


# -- apply -------------------------------------------------------------------


def test_identity_fixes_points():
    psi = identity_map(2)
    x = np.array([0.7, -1.3])
    assert np.allclose(apply(psi, x), x)


def test_neck_inversion_values():
    psi = neck_inversion(2)
    assert np.allclose(apply(psi, np.array([2.0, 0.0])), [0.5, 0.0])
    assert is_infinity(apply(psi, np.zeros(2)))
    assert np.allclose(apply(psi, INFINITY), np.zeros(2))


def test_neck_inversion_is_involution():
    psi = neck_inversion(3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.uniform(-2, 2, 3)
        if np.linalg.norm(x) < 0.1:
            continue
        assert np.allclose(apply(psi, apply(psi, x)), x, atol=1e-12)


def test_translation():
    psi = translation_map(np.array([1.0, 2.0]))
    assert np.allclose(apply(psi, np.array([0.5, 0.5])), [1.5, 2.5])
    assert is_infinity(apply(psi, INFINITY))


# -- weight_J ----------------------------------------------------------------


def test_weight_identity_map():
    psi = identity_map(2)
    w = weight_J(psi, np.array([3.0, -4.0]))
    assert np.allclose(w.coeffs, [1, 0, 0, 0])


def test_weight_neck_inversion_at_e1():
    psi = neck_inversion(2)
    w = weight_J(psi, np.array([1.0, 0.0]))
    assert np.allclose(w.coeffs, [0, 1, 0, 0])


def test_weight_norm_scaling():
    """For a unimodular map, ||J(psi, x)|| = ||cx+d||^(1-m)."""
    rng = np.random.default_rng(1)
    psi = compose(translation_map(np.array([0.4, -0.2])), neck_inversion(2))
    assert abs(abs(pseudo_determinant(psi)) - 1.0) <= 1e-12
    for _ in range(20):
        x = rng.uniform(0.3, 2.0, 2)
        den = psi.c * Multivector.vector(x, 2) + psi.d
        expect = den.norm() ** (1 - psi.kernel_exponent)
        assert abs(weight_J(psi, x).norm() - expect) <= 1e-12 * expect


def test_weight_singular_point():
    psi = neck_inversion(2)
    with pytest.raises(SingularPointError):
        weight_J(psi, np.zeros(2))


# -- compose / inverse -------------------------------------------------------


def test_compose_pointwise():
    rng = np.random.default_rng(2)
    p1 = translation_map(np.array([1.0, -0.5]))
    p2 = neck_inversion(2)
    comp = compose(p2, p1)
    for _ in range(50):
        x = rng.uniform(-2, 2, 2)
        step = apply(p1, x)
        if is_infinity(step):
            continue
        expect = apply(p2, step)
        got = apply(comp, x)
        if is_infinity(expect):
            assert is_infinity(got)
        else:
            assert np.allclose(got, expect, atol=1e-10)


def test_compose_neck_twice_is_identity():
    comp = compose(neck_inversion(2), neck_inversion(2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.uniform(-2, 2, 2)
        assert np.allclose(apply(comp, x), x, atol=1e-12)


def test_inverse_round_trip():
    rng = np.random.default_rng(4)
    psi = compose(
        translation_map(np.array([0.3, 0.9])),
        compose(neck_inversion(2), translation_map(np.array([-1.1, 0.2]))),
    )
    inv = inverse(psi)
    for _ in range(50):
        x = rng.uniform(-2, 2, 2)
        y = apply(psi, x)
        if is_infinity(y):
            continue
        back = apply(inv, y)
        assert not is_infinity(back)
        assert np.allclose(back, x, atol=1e-9)


def test_inverse_of_neck_is_neck():
    inv = inverse(neck_inversion(2))
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.uniform(0.2, 2.0, 2)
        assert np.allclose(apply(inv, x), apply(neck_inversion(2), x), atol=1e-12)


def test_compose_dim_mismatch():
    with pytest.raises(VahlenError):
        compose(identity_map(2), identity_map(3))


# -- cayley ------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_cayley_poles(n):
    c = cayley(n)
    at0 = apply(c, np.zeros(n))
    expect = np.zeros(n + 1)
    expect[n] = -1.0
    assert np.allclose(at0, expect, atol=1e-12)
    atinf = apply(c, INFINITY)
    assert np.allclose(atinf, -expect, atol=1e-12)


def test_cayley_at_e1():
    c = cayley(2)
    got = apply(c, np.array([1.0, 0.0]))
    assert np.allclose(got, [-1.0, 0.0, 0.0], atol=1e-12)


def test_cayley_images_on_unit_sphere():
    c = cayley(2)
    rng = np.random.default_rng(6)
    for _ in range(200):
        x = rng.uniform(-5, 5, 2)
        u = apply(c, x)
        assert abs(np.linalg.norm(u) - 1.0) <= 1e-12


def test_cayley_homeomorphism_round_trip():
    c = cayley(3)
    cinv = inverse(c)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = rng.uniform(-3, 3, 3)
        u = apply(c, x)
        assert np.allclose(apply(cinv, u), np.append(x, 0.0), atol=1e-10)


def test_cayley_embed_matches_apply():
    c = cayley(2)
    rng = np.random.default_rng(8)
    for _ in range(50):
        x = rng.uniform(-4, 4, 2)
        assert np.allclose(cayley_embed(x, 2), apply(c, x), atol=1e-12)
    assert np.allclose(cayley_embed(INFINITY, 2), [0, 0, 1])


def test_cayley_embed_jacobian_fd():
    rng = np.random.default_rng(9)
    x = rng.uniform(-1.5, 1.5, 3)
    jac = cayley_embed_jacobian(x)
    h = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        fd = (cayley_embed(x + e, 3) - cayley_embed(x - e, 3)) / (2 * h)
        assert np.allclose(jac[:, j], fd, atol=1e-8)


# -- Cauchy kernel G ---------------------------------------------------------


def test_kernel_values():
    assert np.allclose(cauchy_kernel_G([1.0, 0.0], 2).vector_part(), [1.0, 0.0])
    assert np.allclose(cauchy_kernel_G([2.0, 0.0], 2).vector_part(), [0.5, 0.0])
    assert np.allclose(cauchy_kernel_G([2.0, 0.0, 0.0], 3).vector_part(), [0.25, 0.0, 0.0])


def test_kernel_singularity():
    with pytest.raises(SingularPointError):
        cauchy_kernel_G(np.zeros(2), 2)


# -- covariance --------------------------------------------------------------


def test_covariance_identity_map():
    assert covariance_residual(identity_map(2), [1.0, 0.0], [0.0, 1.0]) <= 1e-14


def test_covariance_translation():
    psi = translation_map(np.array([0.7, -0.1]))
    assert covariance_residual(psi, [1.0, 0.2], [-0.3, 1.1]) <= 1e-14


def test_covariance_neck_inversion():
    rng = np.random.default_rng(10)
    for _ in range(50):
        x = rng.uniform(0.6, 1.8, 2) * rng.choice([-1, 1], 2)
        y = rng.uniform(0.6, 1.8, 2) * rng.choice([-1, 1], 2)
        if np.linalg.norm(x - y) < 0.1:
            continue
        assert covariance_residual(neck_inversion(2), x, y) <= 1e-10


def test_covariance_cayley():
    rng = np.random.default_rng(11)
    for _ in range(50):
        x = rng.uniform(-1.5, 1.5, 2)
        y = rng.uniform(-1.5, 1.5, 2)
        if np.linalg.norm(x - y) < 0.1:
            continue
        assert covariance_residual(cayley(2), x, y) <= 1e-10


def test_covariance_detects_wrong_weight_exponent():
    """Shifting the exponent of the J factors alone must break the identity
    by orders of magnitude (the control behind the convention tests)."""
    rng = np.random.default_rng(12)
    for shift in (-1, 1):
        worst = 0.0
        for _ in range(20):
            x = rng.uniform(-1.5, 1.5, 2)
            y = rng.uniform(-1.5, 1.5, 2)
            if np.linalg.norm(x - y) < 0.3:
                continue
            worst = max(
                worst, covariance_residual(cayley(2), x, y, weight_exponent_shift=shift)
            )
        assert worst > 1e-7


def test_pseudo_determinant_values():
    assert pseudo_determinant(identity_map(2)) == 1.0
    assert pseudo_determinant(neck_inversion(2)) == 1.0
    assert pseudo_determinant(cayley(2)) == -2.0


def test_grade1_purity_enforced():
    from sphereglue.moebius import VahlenMap

    # a trivector component in Cl_3 pushes images off grade 1
    coeffs = np.zeros(8)
    coeffs[0] = 1.0
    coeffs[7] = 0.5
    bad = VahlenMap(
        Multivector(3, coeffs),
        Multivector.zero(3),
        Multivector.zero(3),
        Multivector.scalar(1.0, 3),
        3,
        3,
    )
    with pytest.raises(VahlenError):
        apply(bad, np.array([1.0, 0.3, -0.2]))
