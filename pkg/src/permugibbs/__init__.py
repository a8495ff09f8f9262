"""Gibbs-distributed permutations of one-dimensional point sets.

Exact enumeration of finite-volume specifications, a swap-Metropolis
sampler, and a verification harness for the structural facts that are
checkable at desk scale: flow constancy, ground states, uniform laws at
zero potential, jump-probability bounds, cuts and crossing strands, and
volume convergence.
"""

from .pointset import (DualPoint, PointSet, PointSetError, RegularityConstants,
                       generate, growth_constant, regularity_constants,
                       separation_constant)
from .permutation import (Boundary, CycleCensus, FlowRecord, PermutationError,
                          WindowPermutation, boundary, crossing_jumps,
                          cycle_census, flow_at, ground_state, is_compatible,
                          is_cut, is_pre_cut, truncated_flow)
from .energy import (EnergyError, Potential, PsiThreshold, c_psi, hamiltonian,
                     min_energy_rearrangement, potential_value, power, psi,
                     swap_delta, swap_lower_bound, zero)
from .sampler import (ChainConfig, EmpiricalDistribution, SamplerError,
                      SpecificationTable, compatible_domain_image,
                      enumerate_compatible, exact_probability, mcmc_run,
                      tv_distance, ENUMERATION_CAP)
from .experiments import (CheckReport, CutStatistics, ExperimentError,
                          ScanResult, CHECK_IDS, count_strands_between,
                          coupling_scan, cut_statistics, k_threshold,
                          named_check, volume_scan)

__version__ = "0.1.0"
