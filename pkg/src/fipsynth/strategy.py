from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from .automata import MealyMachine, mealy_trace


@dataclass(frozen=True)
class Strategy:
    """Finite-state decision function.

    ``first_action`` is played on the empty history; after reading a move
    the machine outputs the action for the following round.
    """

    machine: MealyMachine
    first_action: Hashable
    denormalized: bool = False

    def decide(self, history: Sequence[Hashable]) -> Hashable:
        if not history:
            return self.first_action
        return mealy_trace(self.machine, history)[-1]

    def decisions(self, history: Sequence[Hashable]) -> list:
        """Actions prescribed before each move of ``history`` and after it."""
        return [self.first_action] + mealy_trace(self.machine, history)


def constant_strategy(moves, action: Hashable) -> Strategy:
    from .automata import SemiAutomaton

    semi = SemiAutomaton(moves, [[0] * len(moves)])
    return Strategy(MealyMachine(semi, [[action] * len(moves)]), action)
