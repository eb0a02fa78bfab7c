"""Models package for data structures."""
from .fabric import (
    EntityKind,
    Entity,
    Attachment,
    FabricModel,
    Topology,
    Segment,
    PairReach,
    ReachabilityReport,
)
from .assignment import (
    Pair,
    DemandSet,
    Assignment,
    AssignmentTable,
    Violation,
    ValidationReport,
    ConflictKey,
    SolveStatus,
    SolveOutcome,
    Instance,
)
from .simulation import (
    TrafficModel,
    Transmission,
    CollisionBreach,
    AuditVerdict,
    PairMetrics,
    FiberMetrics,
    Metrics,
    SummaryRow,
)

__all__ = [
    "EntityKind",
    "Entity",
    "Attachment",
    "FabricModel",
    "Topology",
    "Segment",
    "PairReach",
    "ReachabilityReport",
    "Pair",
    "DemandSet",
    "Assignment",
    "AssignmentTable",
    "Violation",
    "ValidationReport",
    "ConflictKey",
    "SolveStatus",
    "SolveOutcome",
    "Instance",
    "TrafficModel",
    "Transmission",
    "CollisionBreach",
    "AuditVerdict",
    "PairMetrics",
    "FiberMetrics",
    "Metrics",
    "SummaryRow",
]
