"""Exception types raised by the planner stack."""


class PlanningError(Exception):
    """Base class for planner failures."""


class CollisionError(PlanningError):
    """A configuration that must be free lies inside an obstacle."""


class InvalidGraphError(PlanningError):
    """A graph element violates a structural precondition (e.g. a zero-length edge)."""


class GraphGenerationError(PlanningError):
    """No usable lattice could be built (e.g. the roll-in target is occupied)."""


class OracleGuardError(PlanningError):
    """Exhaustive enumeration refused because the graph is too large."""


class ScenarioError(ValueError):
    """A scenario document failed to parse or validate."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
