"""Moment inequalities for U-statistics: exact oracles, bound expressions, simulation."""
from .core import (FiniteDistribution, KernelSpec, KernelTable, ProjectionSet,
                   bernoulli, build_kernel, check_degeneracy, check_symmetry, corpus,
                   corpus_entry, evaluate_U, hoeffding_project, kernel_abs_moment,
                   martingale_term, rademacher)
from .errors import (BudgetExceeded, DegenerateZeroKernel, KernelError,
                     NotDegenerateError, SpecError, SymstatError)
from .oracle import (ExactMomentResult, cond_moment, exact_sumsq_moment,
                     exact_Tn_moment, mc_crosscheck)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "DegenerateZeroKernel", "ExactMomentResult", "FiniteDistribution",
    "KernelError", "KernelSpec", "KernelTable", "NotDegenerateError", "ProjectionSet",
    "SpecError", "SymstatError", "bernoulli", "build_kernel", "check_degeneracy",
    "check_symmetry", "cond_moment", "corpus", "corpus_entry", "evaluate_U",
    "exact_Tn_moment", "exact_sumsq_moment", "hoeffding_project", "kernel_abs_moment",
    "martingale_term", "mc_crosscheck", "rademacher",
]
