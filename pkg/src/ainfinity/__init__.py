"""Exact computation of A-infinity structures on Ext algebras of truncated
polynomial rings, with an independent Stasheff-identity verifier."""

from .errors import (AInfinityError, CertificateMissing, CommutationFailure,
                     DimensionMismatch, InvalidParameter, NotABoundary,
                     NotACycle, NotPeriodic, PsiNotCycle, TruncationTooShort,
                     UnresolvableValue)
from .ff_linalg import Matrix, PrimeField, kernel_basis, rref, solve
from .resolution import (AlgebraElement, AlgebraMap, PeriodicResolution,
                         TruncatedPolyAlgebra, build_cyclic_resolution,
                         check_exactness)
from .endo_dga import (CompactForm, EndomorphismAlgebra, GradedEndomorphism,
                       HomologyClass)
from .kadeishvili import (AInfinityRecord, HElement, SignedTerm,
                          StructureSummary, first_complete_arity,
                          insertion_sign, monomial_name, obstruction_terms,
                          split_sign)
from .stasheff import (StructureTable, VerificationReport, check_morphism,
                       check_structure, verify_structure)
from .cli import RunConfig, default_truncation, parse_structure, run

__all__ = [
    "AInfinityError", "CertificateMissing", "CommutationFailure",
    "DimensionMismatch", "InvalidParameter", "NotABoundary", "NotACycle",
    "NotPeriodic", "PsiNotCycle", "TruncationTooShort", "UnresolvableValue",
    "Matrix", "PrimeField", "kernel_basis", "rref", "solve",
    "AlgebraElement", "AlgebraMap", "PeriodicResolution",
    "TruncatedPolyAlgebra", "build_cyclic_resolution", "check_exactness",
    "CompactForm", "EndomorphismAlgebra", "GradedEndomorphism", "HomologyClass",
    "AInfinityRecord", "HElement", "SignedTerm", "StructureSummary",
    "first_complete_arity", "insertion_sign", "monomial_name",
    "obstruction_terms", "split_sign",
    "StructureTable", "VerificationReport", "check_morphism",
    "check_structure", "verify_structure",
    "RunConfig", "default_truncation", "parse_structure", "run",
]

__version__ = "0.1.0"
