"""Exact tools for knapsack polytopes, their integer cones and bin packing."""
from .binpack import (FractionalPacking, GapReport, Packing, gap_report,
                      irup_family, residues_distinct, solve_ilp, solve_lp,
                      vertex_distance)
from .errors import (InsufficientWeightError, InvalidInputError,
                     NoCertificateError, NoDecompositionError,
                     NotInSimplexError, NotInvertibleError,
                     PreconditionViolatedError, ResourceLimitError,
                     SingularBasisError, VertexConeError)
from .group import (DiagonalBasis, element_of_fractional_size, full_generator,
                    generator_orbit, residue_map, size_of)
from .knapsack import (Instance, SimplexCoords, VertexSet, barycentric,
                       count_configs, enumerate_configs, hull_vertices,
                       simplex_containing)
from .level import (LevelProfile, Weights, decompose_multiple,
                    find_shift_multiplicity, jumps_at, shift_weight,
                    structure_decompose, support_reduce,
                    verify_level_recurrence)
from .lowerbound import (SylvesterInstance, check_long_run, check_uniqueness,
                         construct_sylvester_instance, dist_certificate,
                         search_min_instance)
from .numeric import (Rational, Residue, crt_solve, ext_gcd, mod_inverse,
                      sylvester)

__version__ = "0.1.0"
