"""Separation-rank toolkit for multiplicative recurrent networks.

Builds the closed-form weights tensor (tensor-train), grid tensors, and
tensor-network graphs of shallow and deep multiplicative recurrent
networks, and checks the rank laws, lower bounds, and combinatorial lemmas
that govern their start/end dependency structure — with an exact rational
rank oracle and an SVD-based numeric one.
"""

from .builders import (GridTensor, WeightsTensor, build_grid_tensor,
                       build_weights_tensor, grid_budget, score_from_tensor)
from .errors import (FieldMismatchError, InvalidInputError, ParameterError,
                     RacsepError, ResourceBudgetError, ShapeError)
from .network import (InputSequence, Nonlinearity, RAC_PRODUCT, RacParams,
                      TemplateEncoder, forward_all_timesteps, forward_deep,
                      forward_shallow, load_params, neutral_h0, rnn_additive,
                      save_params, step_deep)
from .ranks import RankReport, multiset_coefficient, rank_exact, rank_numeric
from .tensor import (EXACT, FLOAT, DenseTensor, IndexPartition, dematricize,
                     exact_array, hadamard_power, load_tensor, matricize,
                     save_tensor, tensor_product)
from .tn import (BasicUnitCount, Edge, NoCloneReport, OpenLeg, TnGraph,
                 attach_inputs, build_deep_tn, build_mps, contract,
                 count_basic_units, delta_tensor, load_graph, min_cut,
                 no_clone_counterexample, save_graph)
from .verification import (AppendixBAssignment, Report, ReportRow,
                           bucket_states, bucket_trajectories,
                           check_bucket_lemma, check_claim1_equality,
                           check_conjecture_bound,
                           check_decomposition_identity,
                           check_hadamard_power_bound, check_no_cloning,
                           check_polynomial_rank_prevalence,
                           check_rearrangement_lemma, draw_params,
                           rows_to_csv, trial_rng, verify_deep_lower_bound,
                           verify_min_cut, verify_shallow_rank_law,
                           write_csv)

__version__ = "0.1.0"
