"""Deliberately wrong uniform candidates for the impossibility constructions."""

from dataclasses import dataclass

from umisim.runtime import Protocol


@dataclass(frozen=True)
class Flag:
    flag: bool = False
    tick: int = 0


class TickingCandidate(Protocol):
    """Deterministic and anonymous: drop the flag when a predecessor holds one; count activations."""

    name = "ticking"
    anonymous = True
    deterministic = True

    def zero_state(self, i):
        return Flag()

    def execute(self, i, own, preds, rng):
        return Flag(own.flag and not any(s.flag for s in preds), own.tick + 1)

    def mis_output(self, i, own, preds):
        return own.flag


class SilentCandidate(Protocol):
    """Never enabled: whatever the initial flags are, they are final."""

    name = "silent"
    anonymous = True
    deterministic = True

    def enabled(self, i, own, preds):
        return False

    def zero_state(self, i):
        return Flag()

    def execute(self, i, own, preds, rng):
        return own

    def mis_output(self, i, own, preds):
        return own.flag


class Churn(Protocol):
    """Integer state with a guard that switches on and off; reads predecessors only."""

    name = "churn"

    def zero_state(self, i):
        return 0

    def enabled(self, i, own, preds):
        return (own + sum(preds)) % 3 != 0

    def execute(self, i, own, preds, rng):
        return (own + 1 + sum(preds) % 2) % 97

    def mis_output(self, i, own, preds):
        return own % 2 == 0


class AlwaysOn(Protocol):
    """Always enabled; state counts activations."""

    name = "always-on"

    def zero_state(self, i):
        return 0

    def execute(self, i, own, preds, rng):
        return own + 1

    def mis_output(self, i, own, preds):
        return False
