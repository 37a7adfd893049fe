from .decreasing import (
    ElementDecomposition,
    RefactoringError,
    manage_operation_dec,
    merge_operations_dec,
    merge_to_base_dec,
    refactor_decreasing,
)
from .increasing import (
    manage_operation_inc,
    merge_operations_inc,
    merge_to_base_inc,
    refactor_increasing,
)
from .workspace import FreshNamer, Workspace

__all__ = [
    "ElementDecomposition",
    "FreshNamer",
    "RefactoringError",
    "Workspace",
    "manage_operation_dec",
    "manage_operation_inc",
    "merge_operations_dec",
    "merge_operations_inc",
    "merge_to_base_dec",
    "merge_to_base_inc",
    "refactor_decreasing",
    "refactor_increasing",
]
