"""Exact computations around nilpotent varieties of quivers.

Modules: ``core`` (quivers, forms, roots, Coxeter), ``reps`` (matrices over
exact fields, moment map, flag searches), ``cyclic`` (multipartitions and
nilpotent orbits of cyclic quivers), ``affine`` (tubes, stratification types,
component and sheaf labels), ``flags`` (relative positions and incidence
dimensions), ``census`` (finite-field brute force), ``cli``.
"""

from .core import (Quiver, QuiverClass, affine_a, affine_d, affine_e, classify, coxeter, cyclic_quiver,
                   defect, double, dynkin_d, dynkin_e, euler_form, kronecker, loop_quiver, opposite,
                   positive_roots, quiver, tits_form, transform, type_a)
from .cyclic import (MultiPartition, build_nilpotent, decompose_nilpotent, dim_of, enumerate_cyclic_strata,
                     enumerate_orbits, is_aperiodic, pair_decode, pair_encode, resolution_flag_type)
from .errors import (BudgetExceeded, DimensionVectorError, InternalConsistencyError, NotAperiodicError,
                     QuiverNilError, UnsupportedInputError)
from .linalg import ExactField
from .reps import (DoubledPoint, GradedFlag, NilFlavor, Rep, find_flag, hom_dim, is_nilpotent, lambda_member,
                   moment_map, rank_profile, stable_flags)

__version__ = "0.1.0"
