"""Exception types shared across the engine."""

from __future__ import annotations


class MethodMoverError(Exception):
    """Base class for every error this package raises deliberately."""


class EmptyProject(MethodMoverError):
    """No classes could be parsed from the given source roots."""


class IoError(MethodMoverError):
    """A source root or file could not be read."""


class MethodNotInClass(MethodMoverError):
    """The named method does not belong to the given class."""


class UnknownClass(MethodMoverError):
    """A class reference does not resolve in the project index."""


class UnknownMethod(MethodMoverError):
    """A method reference does not resolve in its class."""


class StaleIndex(MethodMoverError):
    """A file changed on disk after the index was built."""


class EmptyContent(MethodMoverError):
    """Embedding input was empty after stripping whitespace."""


class ProviderUnavailable(MethodMoverError):
    """A remote embedding or chat backend could not be reached."""


class DimensionMismatch(MethodMoverError):
    """Cosine similarity received vectors of different dimensions."""


class ZeroVector(MethodMoverError):
    """Cosine similarity received an all-zero vector."""


class MalformedResponse(MethodMoverError):
    """The chat model's reply failed strict parsing twice in a row."""


class PlanConflict(MethodMoverError):
    """A move plan produced overlapping edits in one file."""


class InfeasibleMove(MethodMoverError):
    """A move plan failed its feasibility preconditions."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code
        self.detail = detail


class ReparseFailed(MethodMoverError):
    """Edited files did not parse back to the expected structure."""


class MissingRun(MethodMoverError):
    """A gold-set host has no recommendation run to evaluate."""


class InsufficientCandidates(MethodMoverError):
    """The project cannot supply enough feasible perturbation moves."""
