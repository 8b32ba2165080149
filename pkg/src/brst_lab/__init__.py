"""Finite-dimensional BRST quantization: ghost algebra, classical charge, quantum operator, cohomology."""
from __future__ import annotations

from .brst import BRSTCertificate, QuantumBRST, quantum_brst
from .cohomology import (
    CochainComplex,
    brst_complex,
    duality_check,
    extended_complex,
    sphere_complex,
)
from .errors import (
    BRSTError,
    ConfigurationError,
    ConstructionError,
    DomainError,
    InvalidComplexError,
    NilpotencyError,
    NoAdjointError,
    NotInImageError,
    ParityError,
    RankOverflowError,
    TheoremViolation,
)
from .ghostalg import MultiIndex, normalize
from .koszul import BRSTCharge, build_brst, contracting_homotopy, koszul_tate
from .observables import CoefficientPoly, Observable, StructureConstants, conjugate, multiply, parity, poisson
from .quantize import QuantumGenerators, adjoint, generator_ops, ghost_number_op, quantize
from .states import ExtendedState, FockSpace, pairing_gram, scalar_product
from .system import ConstraintSystem, load_system

__version__ = "0.1.0"
