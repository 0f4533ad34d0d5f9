"""Clifford-valued fields, finite-difference Dirac operators and the
Moebius pullback that preserves monogenicity."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Multivector
from .config import DEFAULT_FD_STEP
from .moebius import VahlenMap, apply, cauchy_kernel_G, is_infinity, weight_J


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class CliffordField:
    """A pure map from R^dim_in to Cl_{dim_alg} with an explicit domain
    predicate (stencil safety for finite differences)."""

    dim_in: int
    dim_alg: int
    func: Callable[[np.ndarray], Multivector]
    domain: Callable[[np.ndarray], bool] = field(default=lambda x: True)

    def __call__(self, x) -> Multivector:
        x = np.asarray(x, dtype=np.float64)
        if not self.domain(x):
            raise DomainError(f"point {x} outside field domain")
        return self.func(x)

    def in_domain(self, x) -> bool:
        return self.domain(np.asarray(x, dtype=np.float64))


def constant_field(a: Multivector, dim_in: int) -> CliffordField:
    return CliffordField(dim_in, a.dim, lambda x: a)


def g_translate(a: np.ndarray, n: int | None = None, dim_alg: int | None = None) -> CliffordField:
    """x -> G(x - a) = (x-a)/||x-a||^n on R^len(a) minus {a}."""
    a = np.asarray(a, dtype=np.float64)
    if n is None:
        n = a.size
    if dim_alg is None:
        dim_alg = a.size
    return CliffordField(
        a.size,
        dim_alg,
        lambda x: cauchy_kernel_G(x - a, n, dim_alg),
        domain=lambda x: bool(np.linalg.norm(x - a) > 1e-12),
    )


def _stencil_ok(f: CliffordField, x: np.ndarray, h: float) -> bool:
    for j in range(f.dim_in):
        step = np.zeros(f.dim_in)
        step[j] = h
        if not (f.in_domain(x + step) and f.in_domain(x - step)):
            return False
    return True


def dirac_left_fd(f: CliffordField, x, h: float = DEFAULT_FD_STEP) -> Multivector:
    """Central-difference Dirac operator sum_j e_j d f / dx_j; O(h^2)."""
    x = np.asarray(x, dtype=np.float64)
    if h <= 0:
        raise ValueError("step must be positive")
    if not _stencil_ok(f, x, h):
        raise DomainError("finite-difference stencil exits the field domain")
    out = Multivector.zero(f.dim_alg)
    for j in range(f.dim_in):
        step = np.zeros(f.dim_in)
        step[j] = h
        diff = (f(x + step) - f(x - step)) / (2.0 * h)
        out = out + Multivector.basis_vector(j, f.dim_alg) * diff
    return out


def dirac_right_fd(f: CliffordField, x, h: float = DEFAULT_FD_STEP) -> Multivector:
    """Central-difference right Dirac operator sum_j (d f / dx_j) e_j."""
    x = np.asarray(x, dtype=np.float64)
    if h <= 0:
        raise ValueError("step must be positive")
    if not _stencil_ok(f, x, h):
        raise DomainError("finite-difference stencil exits the field domain")
    out = Multivector.zero(f.dim_alg)
    for j in range(f.dim_in):
        step = np.zeros(f.dim_in)
        step[j] = h
        diff = (f(x + step) - f(x - step)) / (2.0 * h)
        out = out + diff * Multivector.basis_vector(j, f.dim_alg)
    return out


def moebius_pullback(psi: VahlenMap, f: CliffordField, dim_in: int | None = None) -> CliffordField:
    """x -> J(psi, x) f(psi(x)); preserves left monogenicity.

    dim_in defaults to the field's input dimension capped by the map's ambient
    dimension; for a Cayley map acting on R^n inside Cl_{n+1} pass dim_in=n.
    """
    if f.dim_alg != psi.ambient_dim:
        raise ValueError("field algebra dim must match the map's ambient dim")
    if dim_in is None:
        dim_in = min(f.dim_in, psi.ambient_dim)

    def dom(x: np.ndarray) -> bool:
        y = apply(psi, x)
        if is_infinity(y):
            return False
        return f.in_domain(y[: f.dim_in])

    def ev(x: np.ndarray) -> Multivector:
        y = apply(psi, x)
        if is_infinity(y):
            raise DomainError("pullback evaluated at a singular point of the map")
        return weight_J(psi, x) * f(y[: f.dim_in])

    return CliffordField(dim_in, psi.ambient_dim, ev, dom)
