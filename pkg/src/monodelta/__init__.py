"""Delta-oriented product lines over a small Java core, with monotonicity
analysis and refactorings towards increasing or decreasing monotonicity."""
from importlib import resources

from .analysis import classify, linearize_down, linearize_up, project, remove_empty_deltas
from .formula import Formula
from .generation import (
    AmbiguityReport,
    GenerationError,
    InvalidProductError,
    Variant,
    activated_deltas,
    apply_ado,
    check_unambiguity,
    enumerate_products,
    generate_variant,
)
from .model import ADO, DeltaModule, Op, Program, ProductLine, Ref, SplError, ValidationError
from .oracle import RandomSplSpec, canonicalize, check_equivalence, generate_random_spl
from .refactor import refactor_decreasing, refactor_increasing
from .syntax import SplSyntaxError, parse_spl, print_program, print_spl

__version__ = "0.1.0"

__all__ = [
    "ADO", "AmbiguityReport", "DeltaModule", "Formula", "GenerationError", "InvalidProductError",
    "Op", "Program", "ProductLine", "RandomSplSpec", "Ref", "SplError", "SplSyntaxError",
    "ValidationError", "Variant", "activated_deltas", "apply_ado", "canonicalize",
    "check_equivalence", "check_unambiguity", "classify", "enumerate_products",
    "epl_source", "generate_random_spl", "generate_variant", "linearize_down", "linearize_up",
    "load_epl", "parse_spl", "print_program", "print_spl", "project", "refactor_decreasing",
    "refactor_increasing", "remove_empty_deltas",
]


def epl_source() -> str:
    """Text of the bundled expression product line."""
    return resources.files(__package__).joinpath("data/epl.spl").read_text(encoding="utf-8")


def load_epl() -> ProductLine:
    return parse_spl(epl_source())
