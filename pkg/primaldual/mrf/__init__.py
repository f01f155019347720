"""Pairwise MRF energies, tree min-sum, dual decomposition and graph cuts"""
from .decomposition import Decomposition, Slave, decompose, parse_strategy
from .dual_decomposition import DDResult, DDSchedule, solve_dual_decomposition
from .graphcut import (
    FlowNetwork, MaxFlowResult, build_cut_network, graphcut_solve, labeling_cut_side, maxflow,
)
from .model import (
    LocalAssignment, MrfModel, brute_force_opt, check_labeling, check_local_polytope,
    denoising_model, energy, grid_model, is_submodular_binary, non_submodular_edges, potts,
)
from .tree import check_forest, tree_minsum
