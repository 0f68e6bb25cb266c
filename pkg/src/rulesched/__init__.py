"""Rule-based nurse scheduling with a chain Bayesian-network EDA and a strength-based classifier system."""

from .acs import ACSScheduler, AcsParams, run_acs
from .base import SolverResult, check_instance
from .boa import BOAScheduler, BoaParams, ChainBayesNet, estimate, run_boa, sample, select
from .exceptions import CapacityError, ContractViolation, GenerationError, InfeasibleNurseError, InstanceError
from .gen import GenSpec, generate, pattern_catalog
from .model import Instance, Nurse, ShiftPattern, feasible_set, load_instance, qualifies, save_instance, validate
from .oracle import OracleLimits, exact_optimum, exhaustive_rule_strings
from .rules import DecodeParams, RuleId, decode, evaluate, string_uniforms
from .schedule import Schedule, coverage, fitness, is_feasible, preference_cost, undercover

__version__ = "0.1.0"
