"""Hat-guessing strategies with extra hats, as independent sets of arrangement graphs."""

from .hatspace import (
    AssignmentSet,
    SpaceParams,
    augment,
    check_independent,
    enumerate_space,
    is_adjacent,
    perfect_size,
    space_size,
    unused_colors,
)
from .perm import Permutation, PermGroup, group_closure, orbit_expand, parity, parse_cycles
from .strategies import StrategySpec, generate, make_strategy, member, parse_strategy

__version__ = "0.1.0"
