"""Statevector simulator of the dressed-encoding quantum gradient protocol."""

from ._qgrad import (
    DressedState,
    GradientOperator,
    PolynomialProblem,
    TrapStateError,
    ZeroBranchError,
    build_D_exact,
    classical_gradient,
    cli_main,
    decode,
    encode,
    estimate_cos_gamma,
    eval_cost,
    evolution,
    finite_diff_gradient,
    make_problem,
    optimize,
    preset_f1,
    preset_f2,
    qpca_copy_count,
    qpca_evolve,
    signed_readout,
    success_probability,
)

__all__ = [
    "DressedState",
    "GradientOperator",
    "PolynomialProblem",
    "TrapStateError",
    "ZeroBranchError",
    "build_D_exact",
    "classical_gradient",
    "cli_main",
    "decode",
    "encode",
    "estimate_cos_gamma",
    "eval_cost",
    "evolution",
    "finite_diff_gradient",
    "make_problem",
    "optimize",
    "preset_f1",
    "preset_f2",
    "qpca_copy_count",
    "qpca_evolve",
    "signed_readout",
    "success_probability",
]
