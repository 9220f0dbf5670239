"""Executable finite-scale constructions around permutations, cardinal arithmetic and permutation models."""

from .report import VERSION as __version__
