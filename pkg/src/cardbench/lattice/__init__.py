"""Finite levels of a locally finite lattice and their automorphism engine."""

from .engine import (
    BlockFrame,
    NotAnAutomorphism,
    PreconditionError,
    Tower,
    extend_to_level,
    move_clauses,
    move_witness,
    phi_extend,
    psi_extend,
    separation_suite,
    verify_frame,
    verify_level,
)
from .joins import check_join_map, join_map, random_subsets, sup
from .levels import DEFAULT_LEVEL_CAP, LatticeElem, LatticeLevel, LevelCapExceeded, build_level, recount
from .poset import (
    NotAPoset,
    Poset,
    automorphisms,
    boolean_lattice,
    chain,
    is_automorphism,
    verify_building_block,
    verify_flcc,
    verify_jordan_dedekind,
)
