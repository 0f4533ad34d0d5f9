"""Glued conformally flat manifolds: two spheres joined through annuli
(two_spheres, radius parameter r > 1) or a plane glued to a sphere
(plane_sphere).

Chart coordinates (the pre-Cayley planes) are the source of truth; sphere
embeddings are derived on demand. Chart j admits ||x|| > 1/r plus infinity
(sphere charts only); coordinates with 1/r < ||x|| < r form the neck, which
is shared between the charts through the involution x -> -x^{-1}.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import moebius
from .moebius import (
    INFINITY,
    VahlenMap,
    apply,
    cayley,
    cayley_embed,
    cayley_embed_jacobian,
    compose,
    inverse,
    is_infinity,
    neck_inversion,
)

TWO_SPHERES = "two_spheres"
PLANE_SPHERE = "plane_sphere"

BODY = "body"
NECK = "neck"
INADMISSIBLE = "inadmissible"


class ManifoldError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    has_sphere: bool
    scale: float = 1.0


@dataclass(frozen=True)
class GluedManifold:
    n: int
    kind: str
    r: float
    charts: tuple[Chart, ...]

    def __post_init__(self):
        if self.r <= 1.0:
            raise ManifoldError("gluing radius r must exceed 1")
        if self.kind not in (TWO_SPHERES, PLANE_SPHERE):
            raise ManifoldError(f"unknown manifold kind {self.kind!r}")
        if len(self.charts) < 2:
            raise ManifoldError("need at least two charts")

    def chart(self, j: int) -> Chart:
        return self.charts[j - 1]


def two_spheres(n: int, r: float, scales: tuple[float, float] = (1.0, 1.0)) -> GluedManifold:
    return GluedManifold(n, TWO_SPHERES, r, (Chart(True, scales[0]), Chart(True, scales[1])))


def plane_sphere(n: int, r: float, sphere_scale: float = 1.0) -> GluedManifold:
    return GluedManifold(n, PLANE_SPHERE, r, (Chart(False), Chart(True, sphere_scale)))


@dataclass(frozen=True)
class ManifoldPoint:
    chart: int
    coord: object  # np.ndarray or INFINITY

    def __post_init__(self):
        if self.chart not in (1, 2):
            raise ManifoldError("chart must be 1 or 2")
        if not is_infinity(self.coord):
            c = np.asarray(self.coord, dtype=np.float64)
            c.setflags(write=False)
            object.__setattr__(self, "coord", c)


def point(chart: int, coord) -> ManifoldPoint:
    return ManifoldPoint(chart, coord)


def classify(m: GluedManifold, p: ManifoldPoint) -> str:
    """body / neck / inadmissible for the point's own chart coordinates."""
    ch = m.chart(p.chart)
    if is_infinity(p.coord):
        return BODY if ch.has_sphere else INADMISSIBLE
    rho = float(np.linalg.norm(p.coord))
    if rho >= m.r:
        return BODY
    if rho > 1.0 / m.r:
        return NECK
    return INADMISSIBLE


def transition_psi12(m: GluedManifold) -> VahlenMap:
    """The involution x -> -x^{-1} between the chart coordinate planes."""
    return neck_inversion(m.n)


def continuation_Psi12(m: GluedManifold) -> VahlenMap:
    """Same coefficients as transition_psi12 but admitted on all of
    ||x|| < r (the unique Moebius continuation; 0 maps to infinity)."""
    return neck_inversion(m.n)


def _neck_image(coord):
    if is_infinity(coord):
        return np.zeros(0)  # unused; neck points are finite
    n2 = float(coord @ coord)
    return coord / n2


def apply_transition(m: GluedManifold, coord):
    """Evaluate the (continued) transition at a chart coordinate, total on
    the compactified plane."""
    if is_infinity(coord):
        return np.zeros(m.n)
    coord = np.asarray(coord, dtype=np.float64)
    if float(coord @ coord) == 0.0:
        return INFINITY
    return _neck_image(coord)


def equivalent(m: GluedManifold, p: ManifoldPoint, q: ManifoldPoint, rtol: float = 1e-10) -> bool:
    for pt in (p, q):
        if classify(m, pt) == INADMISSIBLE:
            raise ManifoldError("inadmissible point")
    if p.chart == q.chart:
        if is_infinity(p.coord) or is_infinity(q.coord):
            return is_infinity(p.coord) and is_infinity(q.coord)
        return bool(
            np.linalg.norm(p.coord - q.coord)
            <= rtol * max(1.0, float(np.linalg.norm(p.coord)))
        )
    if classify(m, p) != NECK or classify(m, q) != NECK:
        return False
    img = apply_transition(m, p.coord)
    return bool(np.linalg.norm(img - q.coord) <= rtol * max(1.0, float(np.linalg.norm(img))))


def canonical(m: GluedManifold, p: ManifoldPoint) -> ManifoldPoint:
    """Neck points normalized to chart 1; body points unchanged."""
    region = classify(m, p)
    if region == INADMISSIBLE:
        raise ManifoldError("inadmissible point")
    if region == NECK and p.chart == 2:
        return ManifoldPoint(1, apply_transition(m, p.coord))
    return p


def embed(m: GluedManifold, p: ManifoldPoint) -> np.ndarray:
    """Embedding of the point into R^{n+1}: the (scaled) Cayley image for
    sphere charts, the coordinate plane (last component 0) for plane charts."""
    ch = m.chart(p.chart)
    if ch.has_sphere:
        return ch.scale * cayley_embed(p.coord, m.n)
    if is_infinity(p.coord):
        raise ManifoldError("plane chart has no point at infinity")
    out = np.zeros(m.n + 1)
    out[: m.n] = p.coord
    return out


def embed_jacobian(m: GluedManifold, chart: int, coord: np.ndarray) -> np.ndarray:
    ch = m.chart(chart)
    if ch.has_sphere:
        return ch.scale * cayley_embed_jacobian(coord)
    jac = np.zeros((m.n + 1, m.n))
    jac[: m.n, :] = np.eye(m.n)
    return jac


def to_sphere(m: GluedManifold, p: ManifoldPoint) -> np.ndarray:
    """Unit-norm sphere embedding; errors for the plane chart."""
    ch = m.chart(p.chart)
    if not ch.has_sphere:
        raise ManifoldError("no sphere embedding: chart is a coordinate plane")
    return embed(m, p)


@lru_cache(maxsize=None)
def _chart_maps(n: int, kind: str, scales: tuple[float, ...]) -> dict:
    """Embedding maps of each chart as Vahlen matrices in Cl_{n+1}."""
    k = n + 1
    maps = {}
    cay = cayley(n)
    for j, (has_sphere, scale) in enumerate(
        [(kind == TWO_SPHERES, scales[0]), (True, scales[1])], start=1
    ):
        if has_sphere:
            if scale != 1.0:
                s = moebius.VahlenMap(
                    moebius.Multivector.scalar(scale, k),
                    moebius.Multivector.zero(k),
                    moebius.Multivector.zero(k),
                    moebius.Multivector.scalar(1.0, k),
                    k,
                    n,
                )
                maps[j] = compose(s, cay)
            else:
                maps[j] = cay
        else:
            maps[j] = moebius.identity_map(k, n)
    return maps


def chart_transfer(m: GluedManifold, to_chart: int, from_chart: int) -> VahlenMap:
    """Sphere-level Vahlen map carrying the embedded picture of from_chart
    onto that of to_chart (c_to o psi' o c_from^{-1}), as a Cl_{n+1} matrix
    with weight exponent n. transfer(1<-2) and transfer(2<-1) are exact
    matrix inverses of each other."""
    if to_chart == from_chart:
        return moebius.identity_map(m.n + 1, m.n)
    scales = tuple(c.scale for c in m.charts)
    maps = _chart_maps(m.n, m.kind, scales)
    t12 = compose(maps[1], compose(neck_inversion(m.n + 1, m.n), inverse(maps[2])))
    if (to_chart, from_chart) == (1, 2):
        return t12
    return inverse(t12)
