"""Moebius transformations in Vahlen form, conformal weights and the
Euclidean Cauchy kernel.

A map (ax+b)(cx+d)^{-1} is stored as four Clifford coefficients acting on
vectors of R^k (k = ambient_dim) extended by the point at infinity. The
conformal weight J(psi, x) = ~(cx+d) / ||cx+d||^m uses the per-map exponent
m (kernel_exponent); for every map constructed here m equals the dimension
of the manifold the map serves, also when the algebra is Cl_{n+1}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraError,
    Multivector,
    NotInvertibleError,
    clifford_group_inverse,
    reversion,
)
from .config import DEFAULT_RTOL


class _Infinity:
    """The distinguished point of the one-point compactification."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def is_infinity(p) -> bool:
    return p is INFINITY


class VahlenError(ValueError):
    pass


class SingularPointError(VahlenError):
    pass


@dataclass(frozen=True)
class VahlenMap:
    a: Multivector
    b: Multivector
    c: Multivector
    d: Multivector
    ambient_dim: int
    kernel_exponent: int

    def __post_init__(self):
        dims = {self.a.dim, self.b.dim, self.c.dim, self.d.dim}
        if dims != {self.ambient_dim}:
            raise VahlenError("coefficient algebra dims must equal ambient_dim")
        if self.kernel_exponent < 1:
            raise VahlenError("kernel_exponent must be positive")


def identity_map(k: int, m: int | None = None) -> VahlenMap:
    one = Multivector.scalar(1.0, k)
    zero = Multivector.zero(k)
    return VahlenMap(one, zero, zero, one, k, m if m is not None else k)


def translation_map(t: np.ndarray, k: int | None = None, m: int | None = None) -> VahlenMap:
    t = np.asarray(t, dtype=np.float64)
    if k is None:
        k = t.size
    one = Multivector.scalar(1.0, k)
    zero = Multivector.zero(k)
    return VahlenMap(one, Multivector.vector(t, k), zero, one, k, m if m is not None else k)


def neck_inversion(k: int, m: int | None = None) -> VahlenMap:
    """x -> -x^{-1}, the annulus-identifying involution."""
    one = Multivector.scalar(1.0, k)
    zero = Multivector.zero(k)
    return VahlenMap(zero, -one, one, zero, k, m if m is not None else k)


def cayley(n: int) -> VahlenMap:
    """(e_{n+1} x + 1)(x + e_{n+1})^{-1}: R^n onto the unit sphere of R^{n+1}
    minus e_{n+1}. Lives in Cl_{n+1} with weight exponent n."""
    if n < 1:
        raise VahlenError("n must be >= 1")
    k = n + 1
    ep = Multivector.basis_vector(n, k)
    one = Multivector.scalar(1.0, k)
    return VahlenMap(ep, one, one, ep, k, n)


def _as_vector_mv(x, k: int) -> Multivector:
    x = np.asarray(x, dtype=np.float64)
    if x.size > k:
        raise VahlenError(f"point of dim {x.size} exceeds ambient dim {k}")
    return Multivector.vector(x, k)


def apply(psi: VahlenMap, x, rtol: float = DEFAULT_RTOL):
    """Evaluate the map at a finite point or at INFINITY. Returns a vector of
    length ambient_dim, or INFINITY when cx+d fails to be invertible."""
    k = psi.ambient_dim
    if is_infinity(x):
        try:
            cinv = clifford_group_inverse(psi.c, rtol)
        except NotInvertibleError:
            return INFINITY
        res = psi.a * cinv
        return _grade1_or_raise(res, rtol)
    xm = _as_vector_mv(x, k)
    den = psi.c * xm + psi.d
    scale = max(psi.c.norm() * xm.norm() + psi.d.norm(), 1.0)
    if den.norm() <= 1e-12 * scale:
        return INFINITY
    try:
        dinv = clifford_group_inverse(den, rtol)
    except NotInvertibleError:
        return INFINITY
    res = (psi.a * xm + psi.b) * dinv
    return _grade1_or_raise(res, rtol)


def _grade1_or_raise(res: Multivector, rtol: float) -> np.ndarray:
    dev = res.max_grade_deviation(1)
    if dev > max(rtol * max(res.norm(), 1.0), 1e-9):
        raise VahlenError(
            f"invalid Vahlen coefficients: image is not grade-1 (deviation {dev:.3e})"
        )
    return res.vector_part()


def weight_J(psi: VahlenMap, x) -> Multivector:
    """~(cx+d)/||cx+d||^m with m the map's kernel exponent.

    The coefficients are first rescaled so that |a~d - b~c| = 1; the weight is
    then independent of the (projective) scale of the stored matrix.
    """
    if is_infinity(x):
        raise SingularPointError("weight undefined at infinity")
    nu = abs(pseudo_determinant(psi)) ** 0.5
    xm = _as_vector_mv(x, psi.ambient_dim)
    den = (psi.c * xm + psi.d) / nu
    s = den.norm()
    scale = max((psi.c.norm() * xm.norm() + psi.d.norm()) / nu, 1.0)
    if s <= 1e-12 * scale:
        raise SingularPointError("cx+d vanishes: conformal weight singular here")
    return reversion(den) / s**psi.kernel_exponent


def compose(psi2: VahlenMap, psi1: VahlenMap) -> VahlenMap:
    """Matrix product; pointwise apply(compose(psi2, psi1), x) =
    apply(psi2, apply(psi1, x))."""
    if psi2.ambient_dim != psi1.ambient_dim:
        raise VahlenError("cannot compose maps of different ambient dims")
    if psi2.kernel_exponent != psi1.kernel_exponent:
        raise VahlenError("cannot compose maps with different kernel exponents")
    a = psi2.a * psi1.a + psi2.b * psi1.c
    b = psi2.a * psi1.b + psi2.b * psi1.d
    c = psi2.c * psi1.a + psi2.d * psi1.c
    d = psi2.c * psi1.b + psi2.d * psi1.d
    return VahlenMap(a, b, c, d, psi1.ambient_dim, psi1.kernel_exponent)


def pseudo_determinant(psi: VahlenMap) -> float:
    """The scalar a~d - b~c of a Vahlen matrix."""
    delta = psi.a * reversion(psi.d) - psi.b * reversion(psi.c)
    s = delta.scalar_part()
    if delta.max_grade_deviation(0) > DEFAULT_RTOL * max(abs(s), 1.0):
        raise VahlenError("a~d - b~c is not scalar: not a valid Vahlen matrix")
    return s


def inverse(psi: VahlenMap, validate: bool = True) -> VahlenMap:
    """Exact matrix inverse (~d, -~b; -~c, ~a)/(a~d - b~c), validated
    pointwise on sample vectors."""
    delta = pseudo_determinant(psi)
    if abs(delta) <= 1e-14:
        raise VahlenError("Vahlen matrix has vanishing pseudo-determinant")
    inv = VahlenMap(
        reversion(psi.d) / delta,
        -reversion(psi.b) / delta,
        -reversion(psi.c) / delta,
        reversion(psi.a) / delta,
        psi.ambient_dim,
        psi.kernel_exponent,
    )
    if validate:
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 4:
            x = rng.uniform(-1.5, 1.5, psi.ambient_dim)
            y = apply(psi, x)
            if is_infinity(y):
                continue
            back = apply(inv, y)
            if is_infinity(back):
                continue
            if np.linalg.norm(back - x) > 1e-8 * max(1.0, np.linalg.norm(x)):
                raise VahlenError("block-rearranged inverse failed pointwise validation")
            checked += 1
    return inv


def cauchy_kernel_G(x, n: int, dim: int | None = None) -> Multivector:
    """x / ||x||^n as a grade-1 multivector (Cl of the vector's dim unless
    dim is given)."""
    x = np.asarray(x, dtype=np.float64)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise SingularPointError("Cauchy kernel singular at the origin")
    return Multivector.vector(x / r**n, dim if dim is not None else x.size)


def covariance_residual(psi: VahlenMap, x, y, weight_exponent_shift: int = 0) -> float:
    """|| G(psi(x)-psi(y)) - sgn * ~J(psi,y)^{-1} G(x-y) J(psi,x)^{-1} ||.

    sgn is the sign of the pseudo-determinant a~d - b~c: matrices with
    negative pseudo-determinant (e.g. the Cayley transform) satisfy the
    kernel-covariance identity with an overall minus sign.

    weight_exponent_shift perturbs only the exponent inside the J factors
    (leaving the kernel exponent alone); nonzero values are falsification
    controls and must make the residual large.
    """
    import dataclasses as _dc

    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    px = apply(psi, x)
    py = apply(psi, y)
    if is_infinity(px) or is_infinity(py):
        raise SingularPointError("map is singular at an evaluation point")
    m = psi.kernel_exponent
    k = psi.ambient_dim
    lhs = cauchy_kernel_G(px - py, m, k)
    psi_w = psi
    if weight_exponent_shift:
        psi_w = _dc.replace(psi, kernel_exponent=m + weight_exponent_shift)
    jy = weight_J(psi_w, y)
    jx = weight_J(psi_w, x)
    mid = cauchy_kernel_G(_pad(x, k) - _pad(y, k), m, k)
    sgn = 1.0 if pseudo_determinant(psi) > 0 else -1.0
    rhs = clifford_group_inverse(reversion(jy)) * mid * clifford_group_inverse(jx)
    return (lhs - sgn * rhs).norm()


def _pad(x: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros(k)
    out[: x.size] = x
    return out


def cayley_embed(x, n: int | None = None) -> np.ndarray:
    """Closed form of the Cayley image of x in R^n: the unit-sphere point
    (-2x + (||x||^2 - 1) e_{n+1}) / (||x||^2 + 1). Agrees with
    apply(cayley(n), x); INFINITY maps to e_{n+1}."""
    if is_infinity(x):
        if n is None:
            raise VahlenError("n required to embed the point at infinity")
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    x = np.asarray(x, dtype=np.float64)
    if n is None:
        n = x.size
    rho2 = float(x @ x)
    out = np.zeros(n + 1)
    out[: x.size] = -2.0 * x / (rho2 + 1.0)
    out[n] = (rho2 - 1.0) / (rho2 + 1.0)
    return out


def cayley_embed_jacobian(x) -> np.ndarray:
    """(n+1) x n Jacobian of cayley_embed at a finite point."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    rho2 = float(x @ x)
    den = rho2 + 1.0
    jac = np.zeros((n + 1, n))
    num = np.zeros(n + 1)
    num[:n] = -2.0 * x
    num[n] = rho2 - 1.0
    for j in range(n):
        dnum = np.zeros(n + 1)
        dnum[j] = -2.0
        dnum[n] = 2.0 * x[j]
        jac[:, j] = dnum / den - num * (2.0 * x[j]) / den**2
    return jac
