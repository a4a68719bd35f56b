"""Strategy synthesis for games whose information structure is a full-information protocol."""

from .automata import Alphabet, Dfa, MealyMachine, SemiAutomaton
from .fip import FipGame, WinningCondition, coalition, validate
from .normalize import InvalidGame, NormalizedFip, normalize

__all__ = [
    "Alphabet", "Dfa", "FipGame", "InvalidGame", "MealyMachine", "NormalizedFip",
    "SemiAutomaton", "WinningCondition", "coalition", "normalize", "validate",
]
