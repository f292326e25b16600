"""Python surface for the pseudorot C++ core.

The heavy lifting lives in the compiled ``_pseudorot`` extension; this
package just re-exports it under stable names.
"""

from _pseudorot import (
    BudgetExceededError,
    GridSpec,
    Map,
    Vec2,
    build_counterexample,
    c0_bound,
    commutator_defect,
    conjugate,
    deviation,
    rotation_homomorphism,
    rotation_set,
    rotation_vector,
    uniform_bound,
)

__all__ = [
    "BudgetExceededError",
    "GridSpec",
    "Map",
    "Vec2",
    "build_counterexample",
    "c0_bound",
    "commutator_defect",
    "conjugate",
    "deviation",
    "rotation_homomorphism",
    "rotation_set",
    "rotation_vector",
    "uniform_bound",
]
