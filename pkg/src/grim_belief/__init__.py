"""Conditional grim-trigger equilibria in repeated games with uncertain discount factors.

Exact rational arithmetic throughout; numpy holds the event bitsets and the
simulation arrays.
"""

from .almost_complete import (CoverageReport, StrongProfile, common_nature_event, coverage_bounds,
                              high_discount_nature, is_almost_complete_prior, is_almost_complete_strong,
                              nature_common_belief_event, nature_fibers, strong_eps_profile)
from .belief_operators import (CommonBelief, PairIteration, ThresholdFunction, common_f_belief,
                               everyone_f_believes, f_belief, iterated_pair, lower_endpoint, p_belief)
from .belief_space import (Event, ValidationReport, Violation, WorldModel, cell_grid, is_measurable,
                           lambda_event, measurable_events, product_model, uniform_grid_model, validate_model,
                           window_grid_model)
from .equilibrium import (SearchResult, SufficiencyReport, constants_epsilon_bound, exhaustive_search,
                          maximal_cooperation, multi_player_sufficient, slack_constants, two_action_shortcut,
                          verify_formula)
from .errors import ConfigError, DomainError, ModelError, PreconditionError
from .events import describe, evaluate, parse, to_text
from .model_io import DocumentError, ModelDocument, parse_model, read_model, serialize
from .oracle import EXPECTATION, JOINT, Oracle, verify_oracle
from .reports import (ADOPT_GRIM, COOPERATE_ONCE, EQUILIBRIUM, NOT_EQUILIBRIUM, OUTSIDE_SCOPE, STAGE1_DEVIATE,
                      STAGE2_DEFECT, CooperationPair, DeviationDescriptor, Record, VerificationReport)
from .simulate import CrosscheckReport, Estimate, SimConfig, crosscheck, simulate_payoff
from .stage_game import (CooperationSetup, MixedAction, StageGame, expected_payoff, grim_trigger_threshold,
                         is_nash_equilibrium, prisoners_dilemma, punishment_game, repeated_payoffs)
from .thresholds import (ThresholdBundle, TypeThresholds, expectation_thresholds, high_discount_events,
                         thresholds)

__version__ = "0.1.0"
