# core/__init__.py
from .errors import (
    IRPFlowError, InstanceParseError, InstanceValidationError, SolutionParseError,
    StructuralError, ContractViolationError, OracleBudgetExceeded,
)
from .instance import Instance, InstanceParser, load_instance, parse_instance
from .solution import Solution, CostBreakdown, evaluate, split_day
from .validation import Validator, ValidationReport
from .ds_operator import dp_reinsertion, apply_schedule, PieceRecorder
from .local_search import LocalSearch
from .hgs import SearchParams, SearchResult, HGSEngine
from .oracle import brute_force_reinsertion, exhaustive_solve
