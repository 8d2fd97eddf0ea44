"""Conformant manipulation, conformant bribery and voter control on
scoring-rule elections: exact solvers, polynomial special cases, hardness
gadgets and the oracles that check them."""

from .bribery import (BriberyInstance, BriberyWitness, solve_bribery_standard, solve_cb_exact,
                      solve_cb_firstlast, solve_cb_fixed_k)
from .control import (ControlInstance, ControlWitness, dtt_cav_via_xcav, dtt_cdv_via_xcav,
                      reduce_cb_to_crv, reduce_cm_to_xcav, solve_control_exactsearch,
                      solve_xcav_0approval, solve_xcav_1approval, solve_xcav_1veto)
from .core import (BORDA, FIRST_LAST, HYBRID, Election, HybridRule, ScoringRule, approval, explicit,
                   is_winner, parse_rule, scores, scoring_vector, veto, winners)
from .manipulation import (ManipulationInstance, solve_cm_3approval, solve_cm_exact, solve_cm_firstlast,
                           solve_cm_fixed_k, solve_manipulation_standard)
from .matching import (WeightedMultigraph, exact_perfect_bipartite_matching, max_weight_b_matching,
                       max_weight_matching)
from .reductions import GADGETS, GadgetOutput, verify_gadget
from .threedm import RestrictedThreeDMInstance, ThreeDMInstance, gen_restricted, solve_3dm

__version__ = "0.1.0"

__all__ = ["BriberyInstance", "BriberyWitness", "solve_bribery_standard", "solve_cb_exact",
    "solve_cb_firstlast", "solve_cb_fixed_k", "ControlInstance", "ControlWitness",
    "dtt_cav_via_xcav", "dtt_cdv_via_xcav", "reduce_cb_to_crv", "reduce_cm_to_xcav",
    "solve_control_exactsearch", "solve_xcav_0approval", "solve_xcav_1approval",
    "solve_xcav_1veto", "BORDA", "FIRST_LAST", "HYBRID", "Election", "HybridRule", "ScoringRule",
    "approval", "explicit", "is_winner", "parse_rule", "scores", "scoring_vector", "veto",
    "winners", "ManipulationInstance", "solve_cm_3approval", "solve_cm_exact",
    "solve_cm_firstlast", "solve_cm_fixed_k", "solve_manipulation_standard", "WeightedMultigraph",
    "exact_perfect_bipartite_matching", "max_weight_b_matching", "max_weight_matching", "GADGETS",
    "GadgetOutput", "verify_gadget", "RestrictedThreeDMInstance", "ThreeDMInstance",
    "gen_restricted", "solve_3dm"]
