"""Locally Hilbert spaces, locally bounded operators and direct integrals at finite scale.

The package models a quantized domain over a finite directed poset as a
flag of nested subspaces, locally bounded operators as projective families
of level blocks, and direct integrals over atomic measures as weighted
direct sums.  On top of that it computes commutants inside the locally
bounded algebra and checks that decomposable operators are exactly the
commutant of the diagonalizable ones.
"""

__version__ = "0.1.0"

from .errors import LocintError  # noqa: E402
from .poset import DirectedPoset, chain, diamond, from_covers, upper_bound  # noqa: E402
from .domain import QuantizedDomain, build_domain, standard_flag  # noqa: E402
from .direct_integral import (AtomicMeasureSpace, DirectIntegralDomain,  # noqa: E402
                              FiberField)
from .operators import LocalOperator, from_blocks, from_top, lazy_rule, lazy_truncate  # noqa: E402
from .decomposable import (DecomposableOperator, DiagonalizableOperator,  # noqa: E402
                           decomposable_from_fibers, diagonalizable_from_function)
from .commutant import (ambient_basis, double_commutant,  # noqa: E402
                        verify_dec_eq_diag_commutant, verify_dec_projective_system)

__all__ = [
    "LocintError", "DirectedPoset", "chain", "diamond", "from_covers", "upper_bound",
    "QuantizedDomain", "build_domain", "standard_flag", "AtomicMeasureSpace",
    "DirectIntegralDomain", "FiberField", "LocalOperator", "from_blocks", "from_top",
    "lazy_rule", "lazy_truncate", "DecomposableOperator", "DiagonalizableOperator",
    "decomposable_from_fibers", "diagonalizable_from_function", "ambient_basis",
    "double_commutant", "verify_dec_eq_diag_commutant", "verify_dec_projective_system",
]
