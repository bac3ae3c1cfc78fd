"""Exception hierarchy.

Every error raised on bad input derives from :class:`BlottoError`, which is a
``ValueError`` so callers that only care about "bad arguments" can catch that.
"""


class BlottoError(ValueError):
    pass


class GameValidationError(BlottoError):
    pass


class TooFewPlayers(GameValidationError):
    pass


class EmptyGame(GameValidationError):
    pass


class BudgetOutOfRange(GameValidationError):
    pass


class NonPositiveValueBoolean(GameValidationError):
    pass


class DimensionMismatch(GameValidationError):
    pass


class BudgetViolation(GameValidationError):
    def __init__(self, player, total, budget):
        self.player = player
        self.total = total
        self.budget = budget
        super().__init__(
            f"player {player} bids {total!r} in total, budget is {budget!r}"
        )


class ProbabilityOutOfRange(GameValidationError):
    pass


class NotDivisible(BlottoError):
    pass


class LabelOutOfRange(BlottoError):
    pass


class UnbalancedPartition(BlottoError):
    def __init__(self, group, deviation):
        self.group = group
        self.deviation = deviation
        super().__init__(
            f"group {group} misses V/k by relative deviation {deviation:.3e}"
        )


class PreconditionViolated(BlottoError):
    pass


class SumMismatch(BlottoError):
    pass


class TargetOutOfRange(BlottoError):
    pass


class ValueTooLarge(BlottoError):
    pass


class WrongPlayerCount(BlottoError):
    pass


class NonIntegerMass(BlottoError):
    pass


class DegenerateDraw(BlottoError):
    pass


class EmptySample(BlottoError):
    pass


class InfeasibleDeviation(BlottoError):
    pass


class NoKnownEquilibrium(BlottoError):
    pass
