"""Filter pairs over finite algebras: congruences, Leibniz operator, hierarchy checks, entailment and interpolation."""

from ._fpw import (
    Algebra,
    BoundExceeded,
    Error,
    FilterPair,
    InternalError,
    InvariantError,
    MismatchError,
    ParseError,
    congruences,
    entails,
    hierarchy,
    i_filters,
    i_tau,
    interpolate,
    leibniz_omega,
    run,
    subcommands,
    xi,
)

__all__ = [
    "Algebra",
    "BoundExceeded",
    "Error",
    "FilterPair",
    "InternalError",
    "InvariantError",
    "MismatchError",
    "ParseError",
    "congruences",
    "entails",
    "hierarchy",
    "i_filters",
    "i_tau",
    "interpolate",
    "leibniz_omega",
    "run",
    "subcommands",
    "xi",
]
