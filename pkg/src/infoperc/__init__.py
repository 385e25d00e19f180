"""infoperc: numerical laboratory for percolation-style information bounds
on graph reconstruction problems.

Subpackages:
  channels     divergences and contraction coefficients of binary-input channels
  graphs       graphs, factor graphs, and random-graph samplers
  percolation  Monte Carlo / exact connection probabilities, lattices, branching
  exact_mi     brute-force mutual-information oracle and bound verifiers
  simulators   broadcasting, spiked matrices, block models, couplings
  bounds       closed-form impossibility curves
  cli          command-line front end
"""

__version__ = "0.1.0"

from .bounds import (CurvePoint, curve_banks, curve_gupo, curve_ksbm,
                     curve_mns, curve_perc_2sbm, curve_value, f_gupo,
                     fano_bound, fano_bound_from_perc, region_classify)
from .channels import (BinaryInputChannel, BmsMixture, Bsc, DiscretePair,
                       Erasure, FiniteDistribution, GaussianPair,
                       chi2_divergence, chi2_mutual_info, eta_kl,
                       eta_kl_closed, eta_kl_numeric, eta_small_signal,
                       hellinger_bounds, hellinger_sq, kl_divergence,
                       lecam_beta, parse_channel)
from .errors import BudgetExceededError
from . import exact_mi
from .exact_mi import (SmallModel, VerifyReport, binary_symmetric_model,
                       erasure_twin, independent_prior, mc_mi,
                       random_factor_model, verify_compare, verify_thm1,
                       verify_thm2)
from .graphs import (Factor, FactorChannel, FactorGraph, Graph,
                     boundary_at_distance, complete_graph, cycle_graph,
                     dary_tree_graph, equality_channel, from_edge_list_text,
                     grid2d_graph, incidence_factor_graph, make_graph,
                     parity_channel, path_graph, reveal_channel, sample_er,
                     to_edge_list_text, tree_layer, unary_channel)
from .percolation import (BinomialOffspring, ExactPercolator, PercEstimate,
                          PoissonOffspring, er_giant, grid_two_point,
                          grid_two_point_curve, gw_extinction, perc_exact,
                          perc_mc, recursion_check)
from .rng import DEFAULT_SEED, substream
from .simulators import (BroadcastSpec, CouplingStats, RandomGuessReport,
                         SbmInstance, WignerInstance, broadcast_mi,
                         gw_coupling, overlap_metric, random_guess_check,
                         sample_sbm, sample_wigner, wigner_bayes_overlap)
