"""Grid classes of permutations: structure, widths, pattern matching and
hardness constructions."""

from .analysis import (
    NP_COMPLETE,
    POLYNOMIAL,
    INCONCLUSIVE,
    DichotomyVerdict,
    Orientation,
    analyze_structure,
    build_cell_graph,
    bumper_cycle_matrix,
    classify,
    consistent_orientation,
    find_bumper_ended_path,
    is_bumper,
    path_matrix,
    refine,
)
from .constructions import (
    HardnessInstance,
    SignedPermutation,
    add_anchors,
    build_hardness_instance,
    confine,
    fg_transform,
    make_lane,
    path_witness,
    staircase_matrix,
)
from .exceptions import FormatError, ResourceLimitError
from .grid import (
    DEC,
    EMPTY,
    INC,
    GriddedPermutation,
    Gridding,
    GriddingMatrix,
    av,
    find_gridding,
    finite,
    monotone_matrix,
    random_gridded,
    validate_gridding,
)
from .matcher import MatchRequest, MatchResult, dp_match, grid_preserving_match, match
from .perm import Permutation, contains, contains_brute, horizontal_alternation, is_alternation
from .width import (
    GridTree,
    GridTreeBuild,
    PwOrdering,
    build_general_grid_tree,
    exact_width_oracle,
    forest_pw_ordering,
    grid_complexity,
    horizontal_pw,
    pw_under_ordering,
    vertical_pw,
)

__version__ = "0.1.0"
