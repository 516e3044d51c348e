"""
Building an LPV model and sweeping its well-posedness
=====================================================

A continuous-time LPV system keeps the state-space template
dx/dt = A(p) x + B(p) u, y = C(p) x + D(p) u, but lets every matrix vary
with a scheduling vector p confined to a closed box. This script builds a
mass-spring-damper whose stiffness is the scheduling parameter, then asks
whether the bilinear discretization is defined everywhere on the box.
"""

import numpy as np

from lpvsim import (
    DiscretizationConfig,
    LpvStateSpace,
    PMatrixFunction,
    SchedulingDomain,
    serialize_model,
    wellposedness_check,
)

# A(p) = [[0, 1], [-p, -0.5]]: unit mass, damping 0.5, stiffness p in [0.5, 4]
model = LpvStateSpace(
    n_x=2, n_u=1, n_y=1, n_p=1,
    A=PMatrixFunction.affine(
        [[0.0, 1.0], [0.0, -0.5]], [[[0.0, 0.0], [-1.0, 0.0]]]
    ),
    B=PMatrixFunction.constant([[0.0], [1.0]], 1),
    C=PMatrixFunction.constant([[1.0, 0.0]], 1),
    D=PMatrixFunction.zero(1, 1),
    domain=SchedulingDomain([0.5], [4.0]),
)

# evaluate the matrix functions at a frozen point
print("A(p=2):")
print(model.A([2.0]))
print("A(p=4):")
print(model.A([4.0]))

# The discrete stepping matrices exist only where det(I - A(p) Ts/2) != 0.
# The sweep samples box vertices, a regular grid, and seeded random interior
# points, and reports the worst determinant and conditioning it saw.
cfg = DiscretizationConfig(ts=0.1)
report = wellposedness_check(model, cfg, grid_per_dim=11, random_samples=100,
                             seed=42)
print(f"passed: {report.passed}")
print(f"samples checked: {report.samples_checked}")
print(f"min |det(I - A(p) Ts/2)|: {report.min_abs_det:.6f} "
      f"at p = {list(report.argmin_p)}")
print(f"max condition number of (I - A(p) Ts/2): "
      f"{report.max_condition_number:.3f}")

# A model singular inside the box is caught the same way: A(p) = p on
# [0, 40] at Ts = 0.1 hits det(1 - p/20) = 0 exactly at p = 20.
bad = LpvStateSpace(
    n_x=1, n_u=1, n_y=1, n_p=1,
    A=PMatrixFunction(1, 1, (((1,), [[1.0]]),)),
    B=PMatrixFunction.constant([[1.0]], 1),
    C=PMatrixFunction.constant([[1.0]], 1),
    D=PMatrixFunction.zero(1, 1),
    domain=SchedulingDomain([0.0], [40.0]),
)
bad_report = wellposedness_check(bad, cfg, grid_per_dim=11,
                                 random_samples=100, seed=42)
print(f"singular model passed: {bad_report.passed}, "
      f"first singular p = {list(bad_report.singular_points[0])}")

# models round-trip through a strict JSON format
text = serialize_model(model)
print("serialized model starts with:", text[:40].replace("\n", " "))
