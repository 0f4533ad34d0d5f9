"""The piecewise Cauchy kernel on a glued manifold.

The kernel value is the representative with x read in its own chart's
embedding and y read in its own chart's bundle trivialization: when the two
charts differ, the base kernel G(x_s - y_s) is computed in x's chart (with y
carried over through the continued transition) and left-multiplied by the
conformal weight of the sphere-level transfer map evaluated at y. With the
matching section convention this makes the reproducing integral exact; it is
the weight-placement convention validated by the Cauchy-formula suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Multivector
from .manifold import (
    BODY,
    NECK,
    GluedManifold,
    ManifoldPoint,
    ManifoldError,
    apply_transition,
    chart_transfer,
    classify,
    embed,
    equivalent,
)
from .moebius import cauchy_kernel_G, is_infinity, weight_J

SAME_CHART = "same-chart"
OVERLAP_REP = "overlap-rep"
CROSS_GLUE = "cross-glue"


class DiagonalError(ValueError):
    pass


@dataclass(frozen=True)
class KernelValue:
    value: Multivector
    case_tag: str


def kernel_CM(
    m: GluedManifold,
    x: ManifoldPoint,
    y: ManifoldPoint,
    weight_exponent_shift: int = 0,
) -> KernelValue:
    """C_M(x, y) for non-equivalent admissible points.

    weight_exponent_shift perturbs the conformal-weight exponent of the
    cross-chart branch; nonzero values are falsification controls only.
    """
    for p in (x, y):
        if classify(m, p) == "inadmissible":
            raise ManifoldError("inadmissible point")
    if equivalent(m, x, y):
        raise DiagonalError("Cauchy kernel undefined on the diagonal")

    j, k = x.chart, y.chart
    if j == k:
        tag = SAME_CHART
        y_in_j = y.coord
    else:
        tag = OVERLAP_REP if classify(m, y) == NECK else CROSS_GLUE
        y_in_j = apply_transition(m, y.coord)
        if is_infinity(y_in_j):
            # y maps to the far pole of chart j; fall through via embed
            pass
    xs = embed(m, x)
    ys = embed(m, ManifoldPoint(j, y_in_j))
    base = cauchy_kernel_G(xs - ys, m.n, m.n + 1)
    if j == k:
        return KernelValue(base, tag)
    trans = chart_transfer(m, j, k)
    if weight_exponent_shift:
        import dataclasses

        trans = dataclasses.replace(
            trans, kernel_exponent=trans.kernel_exponent + weight_exponent_shift
        )
    w = weight_J(trans, embed(m, y))
    return KernelValue(w * base, tag)


def overlap_consistency_residual(m: GluedManifold, x: ManifoldPoint, y: ManifoldPoint) -> float:
    """Both points in the neck: difference between the direct chart-2
    evaluation and the chart-1 evaluation conjugated by the transfer weights
    (the sphere-level kernel covariance identity)."""
    if classify(m, x) != NECK or classify(m, y) != NECK:
        raise ManifoldError("overlap consistency needs both points in the neck")
    x1 = x.coord if x.chart == 1 else apply_transition(m, x.coord)
    y1 = y.coord if y.chart == 1 else apply_transition(m, y.coord)
    x2 = apply_transition(m, x1)
    y2 = apply_transition(m, y1)

    e1x = embed(m, ManifoldPoint(1, x1))
    e1y = embed(m, ManifoldPoint(1, y1))
    e2x = embed(m, ManifoldPoint(2, x2))
    e2y = embed(m, ManifoldPoint(2, y2))

    trans = chart_transfer(m, 1, 2)  # sphere-2 picture -> sphere-1 picture
    wx = weight_J(trans, e2x)
    wy = weight_J(trans, e2y)
    lhs = wy * cauchy_kernel_G(e1x - e1y, m.n, m.n + 1) * wx
    rhs = cauchy_kernel_G(e2x - e2y, m.n, m.n + 1)
    return (lhs - rhs).norm()
