"""Variable-projection objective, its reverse-mode MGS gradient, and a Broyden solver."""

from ._vpgrad import (
    InputError,
    ObjectiveNearZero,
    RankDeficient,
    account_words,
    build,
    generate,
    gradient,
    mgs,
    objective,
    recover_c,
    solve,
    value_and_gradient,
)

__all__ = [
    "InputError",
    "ObjectiveNearZero",
    "RankDeficient",
    "account_words",
    "build",
    "generate",
    "gradient",
    "mgs",
    "objective",
    "recover_c",
    "solve",
    "value_and_gradient",
]
