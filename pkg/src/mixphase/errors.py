"""Exception hierarchy.

Two families: ``InvalidInput`` (bad arguments, a ``ValueError``) and
``NumericalAbort`` (the quantity asked for does not exist for these inputs,
e.g. a degenerate spectrum or a nodal point). Every error carries a short
machine-readable ``code`` and an optional ``context`` string that callers such
as the CLI fill in with the scenario field or time step involved.
"""
from __future__ import annotations


class MixPhaseError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str = "", *, context: str | None = None):
        super().__init__(message)
        self.context = context

    @property
    def code(self) -> str:
        return type(self).__name__

    def with_context(self, context: str) -> "MixPhaseError":
        self.context = context if self.context is None else f"{context}: {self.context}"
        return self


class InvalidInput(MixPhaseError, ValueError):
    pass


class NumericalAbort(MixPhaseError, ArithmeticError):
    pass


class NonStochasticWeights(InvalidInput):
    pass


class NonOrthonormalFrame(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class NonHermitianInput(InvalidInput):
    pass


class NonUnitaryInput(InvalidInput):
    pass


class InvalidDensity(InvalidInput):
    pass


class InvalidBlochVector(InvalidInput):
    pass


class AntipodalWaypoints(InvalidInput):
    pass


class EmptyPath(InvalidInput):
    pass


class PathTooShort(InvalidInput):
    pass


class FrameDiscontinuity(InvalidInput):
    pass


class ScenarioError(InvalidInput):
    """Malformed or inconsistent scenario description."""


class DegenerateSpectrum(NumericalAbort):
    """Raised when eigenvalues coincide within tolerance.

    ``groups`` lists the index groups (in descending-weight order) whose
    eigenvalues are closer than the tolerance.
    """

    def __init__(self, groups, message: str = "", **kwargs):
        self.groups = tuple(tuple(g) for g in groups)
        super().__init__(message or f"degenerate eigenvalue groups {list(map(list, self.groups))}", **kwargs)


class UndefinedPhase(NumericalAbort):
    pass


class NodalPoint(NumericalAbort):
    """Tr[rho0 U(t)] vanishes on the grid; carries the first offending sample."""

    def __init__(self, index: int, time: float, magnitude: float, **kwargs):
        self.index = index
        self.time = time
        self.magnitude = magnitude
        super().__init__(
            f"|Tr[rho0 U(t)]| = {magnitude:.3e} at step {index} (t = {time:.17g})", **kwargs
        )


class NotParallelTransported(NumericalAbort):
    pass


class OrthogonalEndpoints(NumericalAbort):
    pass


class StepTooCoarse(NumericalAbort):
    pass
