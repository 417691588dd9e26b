# Walkthrough: explicit kernels for off-diagonal perturbation problems.
#
# Data: PSD blocks A_plus, A_minus and a coupling T between the half-spaces.
# The associated matrix is B = (A+I)^(1/2) [[I, T], [T*, -I]] (A+I)^(1/2) - J
# and its kernel has a closed form: on each half-space intersect the weight
# kernel with the coupling annihilator (image of ker T* resp. ker T under
# (A_pm + I)^(-1/2)), then take the direct sum.  A rank-revealing nullspace
# of the assembled B cross-checks every instance.

import numpy as np

from formrep import (
    assemble_offdiag,
    direct_coefficient,
    gen_random,
    kernel_via_theorem,
    offdiag_problem,
)

# (1) Coupling aligned with the positive directions: kernels survive.
problem = offdiag_problem(
    np.diag([0.0, 1.0]), np.diag([0.0, 1.0]), np.array([[0.0, 0.0], [0.0, 1.0]])
)
report = kernel_via_theorem(problem)
print("aligned coupling: theorem dim", report.theorem_kernel.dim,
      "| oracle dim", report.oracle_kernel.dim,
      "| principal angle", f"{report.principal_angle:.2e}")

# (2) Coupling that pairs the zero modes across the split: kernel dies.
problem = offdiag_problem(
    np.diag([0.0, 1.0]), np.diag([0.0, 1.0]), np.array([[1.0, 0.0], [0.0, 0.0]])
)
report = kernel_via_theorem(problem)
print("crossing coupling: theorem dim", report.theorem_kernel.dim,
      "| oracle dim", report.oracle_kernel.dim)

# (3) The certified gap of the shifted matrix never drops below 1 here:
#     the splitting itself creates the gap, coupling only widens it.
result = assemble_offdiag(problem)
print("gap radius:", result.gap_radius, "| residual:", f"{result.first_rep_residual:.2e}")

# (4) The matrix also factors without any involution shift through the
#     direct coefficient [[I - (A_plus+I)^-1, T], [T*, -I + (A_minus+I)^-1]].
direct = direct_coefficient(problem)
print("direct coefficient:")
print(np.round(direct, 6))

# (5) A seeded random instance with prescribed kernel dimensions.
spec = gen_random("offdiag", (6, 5), seed=12, kernel_dims=(2, 1))
problem = offdiag_problem(spec.matrices["A_plus"], spec.matrices["A_minus"], spec.matrices["T"])
report = kernel_via_theorem(problem)
print("random instance: ker A_plus dim", report.ker_diag_plus.dim,
      "| theorem kernel dim", report.theorem_kernel.dim,
      "| matches oracle:", report.dims_match)
