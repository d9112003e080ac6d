"""Exact verification of controlled algebra over finite metric spaces.

Filtered modules assign a submodule ``F(S)`` of a finite free module to each
point set ``S``; the package computes their lean, insular and splitting
constants, the control of maps between them, kernel splittings along
decomposition chains, and finite resolutions.
"""

from .exactlinalg import Ring, Submodule, canonicalize, image, intersect, kernel_of, submodule_sum
from .metric import FiniteMetricSpace, cayley_ball, enlarge, is_r_disjoint, parse_space
from .filtered import (INF, Caps, ConstantResult, FilteredModule, GeneratedFiltration, IsometryAction,
                       StandardSubFiltration, check_equivariance, insular_constant, lean_constant,
                       split_constant)
from .decomp import DecompositionChain, play_game, validate_chain
from .morphism import (FilteredMap, KernelSplitter, bicontrol_constant, control_constant, control_report,
                       kernel, lean_decompose_kernel, split_kernel_element)
from .resolution import build_admissible_presentation, build_cover_epi, build_resolution
from .scenario import Scenario, ScenarioError, generate_example, load_scenario
from .checks import run_scenario
from .suites import run_suite

__version__ = "0.1.0"
