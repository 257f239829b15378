"""Exact computer algebra for polynomial maps with nilpotent Jacobians."""

from .automorphisms import (Automorphism, Composition, EquivalenceWitness, Linear, Translation,
                            Triangular, equivalence_apply, permutation, tame_generator,
                            verify_witness)
from .errors import (DimensionError, InvariantBreach, ModulusMismatchError, NilmapError, ParseError,
                     PreconditionError, RingMismatchError)
from .fixedpoints import (degree_estimate, fixed_point_search, fixed_point_verify,
                          triangular_fixed_solve)
from .fuzz import fuzz_jn
from .inverse import formal_inverse, invert_keller, verify_inverse
from .nilpotency import (closed_form_eigenvalue, euler_identity_check, is_nilpotent, jacobian_rank,
                         lemma1_bridge, sign_classify, two_form_identity_check)
from .pmap import PmapDocument, parse_pmap, parse_polynomial, print_pmap
from .polymap import (PolyMap, PolyMatrix, compose, determinant, is_keller, jacobian, p_degree,
                      realify, stable_extend)
from .polynomial import Polynomial
from .reduction import blow_up, eliminate_t_powers, normalize_keller, to_nilpotent_form
from .report import RunReport
from .scalars import ExtensionScalar, GaussianRational

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
