"""Example: a tour of the library on operators with known answers."""
from __future__ import annotations

import numpy as np

from src.geometry.paths import ParamPath, circle_length, path_length
from src.lib.types import MatrixTuple, PencilPoint
from src.operators.gallery import from_spec
from src.operators.shifts import shift_vector_metric
from src.power.exponent import power_set_sample
from src.spectral.curvature import ricci_tensor_fd, ricci_trace_state
from src.spectral.fields import MetricField
from src.spectral.fk_determinant import dihedral_fk_det, dihedral_log_mean_exact


def main():
    # A(z) = z1 I + z2 diag(1, 2) is singular on the lines z1 = -z2 and z1 = -2 z2
    a = MatrixTuple((np.eye(2), np.diag([1.0, 2.0])))
    print("Ricci at (1, 0.5i):\n", ricci_tensor_fd(MetricField.from_tuple(a), PencilPoint.of(1.0, 0.5j)).ricci.real)
    print("Trace-state Ricci of J2 at 0.3:", ricci_trace_state(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.3))

    # unilateral shift, x = e1: the metric is 1/(|z|^2 - 1), lengths are arccosh gaps
    fld = MetricField.from_function(lambda z: shift_vector_metric("ushift", z[0]), 1, contains=lambda z: abs(z[0]) > 1.0)
    length = path_length(fld, ParamPath.segment(1.5, 3.0))
    print("Unilateral length [1.5, 3]:", length.value, "closed form:", np.arccosh(3.0) - np.arccosh(1.5))

    jordan = from_spec("jordan:4")
    print("Circle length, e4, r=0.01:", circle_length(jordan, 0.01, x="e4"))
    sample = power_set_sample(jordan, ["e1", "e2", "e3", "e4"])
    print(sample.to_frame())

    volterra = from_spec("volterra")
    print(power_set_sample(volterra, [0.0, 0.25, 0.5, 0.75]).to_frame())

    z1, z2 = 0.3 + 0.1j, -0.2j
    print("Dihedral FK det:", dihedral_fk_det(z1, z2), "Jensen:", np.exp(0.5 * dihedral_log_mean_exact(z1, z2)))


if __name__ == "__main__":
    main()
