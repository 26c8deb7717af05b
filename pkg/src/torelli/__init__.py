"""Exact computation of Torelli twist actions on surface-group lower central
series, Malcev algebras of symplectized mapping tori, and machine-checkable
formality certificates."""

__version__ = "0.1.0"

from .words import GroupWord, SurfaceGroup, free_reduce, group_commutator, invert
from .series import TruncatedSeries, exp_truncated, log_truncated, magnus_expand
from .labute import (identity_mod_class, labute_basis, labute_graded_dims,
                     leading_term, lyndon_basis, normal_form)
from .mcg import (Bracket, Compose, Identity, Inverse, MCGWord, TwistAutomorphism,
                  TwistLeaf, builtin_s4_scenario, builtin_separating_twist,
                  depth_report, evaluate, make_separating_twist, parse_mcg_word,
                  validate_twist)
from .torus import (algebra_invariants, build_mapping_torus_algebra, filtered_basis,
                    log_unipotent, mapping_torus_algebra, phi_matrix)
from .sullivan import (formality_verdict, h1_and_cup, minimal_model,
                       obstruction_certificate, triple_massey)
