"""
Data models for demands, wavelength/time-slot grants and their validation.
"""
from enum import Enum
from typing import Dict, Iterable, List, Literal, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr

from ponfabric.models.fabric import Topology
from ponfabric.utils.errors import ConfigError


Pair = Tuple[str, str]


class DemandSet(BaseModel):
    """Ordered communication pairs the fabric must serve."""
    model_config = ConfigDict(frozen=True)

    pairs: Tuple[Pair, ...]
    include_intra_cell: bool = True
    include_olt_pairs: bool = False

    _positions: Dict[Pair, int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._positions = {pair: i for i, pair in enumerate(self.pairs)}

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: Pair) -> bool:
        return tuple(pair) in self._positions

    def position(self, pair: Pair) -> int:
        return self._positions[tuple(pair)]


class Assignment(BaseModel):
    """
    One grant: src may reach dst on this wavelength in this time slot.
    Wavelengths and slots are 1-indexed.
    """
    model_config = ConfigDict(frozen=True)

    src: str
    dst: str
    wavelength: int
    timeslot: int

    @property
    def pair(self) -> Pair:
        return (self.src, self.dst)

    def sort_key(self) -> Tuple[str, str, int, int]:
        return (self.src, self.dst, self.wavelength, self.timeslot)

    def describe(self) -> str:
        return f"{self.src}->{self.dst}@λ{self.wavelength}τ{self.timeslot}"


class AssignmentTable(BaseModel):
    """A set of grants; fingerprint ties a table to the config it was solved for."""
    model_config = ConfigDict(frozen=True)

    assignments: Tuple[Assignment, ...] = ()
    fingerprint: Optional[str] = None

    def __len__(self) -> int:
        return len(self.assignments)

    def sorted(self) -> "AssignmentTable":
        ordered = tuple(sorted(self.assignments, key=Assignment.sort_key))
        return self.model_copy(update={"assignments": ordered})

    @classmethod
    def from_records(
        cls,
        records: Iterable[Tuple[str, str, int, int]],
        fingerprint: Optional[str] = None,
    ) -> "AssignmentTable":
        assignments = tuple(
            Assignment(src=src, dst=dst, wavelength=wavelength, timeslot=timeslot)
            for src, dst, wavelength, timeslot in records
        )
        return cls(assignments=assignments, fingerprint=fingerprint)

    def grants_for(self, pair: Pair) -> List[Assignment]:
        return [a for a in self.assignments if a.pair == tuple(pair)]


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: str
    records: Tuple[Assignment, ...]
    message: str

    def sort_key(self) -> Tuple:
        return (int(self.code[1:]), [r.sort_key() for r in self.records], self.message)


class ValidationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    violations: Tuple[Violation, ...] = ()
    objective: int = 0
    # grants held -> number of demand pairs holding that many valid grants
    coverage: Dict[int, int] = {}

    @property
    def verdict(self) -> Literal["valid", "invalid"]:
        return "invalid" if self.violations else "valid"

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> List[str]:
        return sorted({v.code for v in self.violations}, key=lambda code: int(code[1:]))


class ConflictKey(NamedTuple):
    """A (fiber, wavelength) resource: side is "src" (uplink) or "dst" (downlink)."""
    side: str
    attachment: int
    wavelength: int


class SolveStatus(str, Enum):
    PROVEN_OPTIMAL = "proven-optimal"
    HEURISTIC = "heuristic"
    BOUND_REACHED = "bound-reached"
    BASELINE = "baseline"


class SolveOutcome(BaseModel):
    """Result of one solver run."""
    model_config = ConfigDict(frozen=True)

    table: AssignmentTable
    objective: int
    status: SolveStatus
    nodes: int = 0
    elapsed: float = 0.0
    time_slots: int


class Instance(BaseModel):
    """A topology, the demands to serve on it, and the constraint flavor."""
    model_config = ConfigDict(frozen=True)

    topology: Topology
    demands: DemandSet
    strict_transceivers: bool = False

    @property
    def time_slots(self) -> int:
        return self.topology.time_slots

    @property
    def max_objective(self) -> int:
        """Every demand holding one grant per plane."""
        return self.topology.fabric.planes * len(self.demands)

    def check_consistency(self) -> None:
        """
        Raises:
            ConfigError: if a demand names an entity outside the topology or a self pair
        """
        errors = []
        for src, dst in self.demands.pairs:
            for name in (src, dst):
                if not self.topology.has_entity(name):
                    errors.append(f"demand {src}->{dst} names unknown entity '{name}'")
            if src == dst:
                errors.append(f"demand {src}->{dst} is a self pair")
        if errors:
            raise ConfigError("Inconsistent instance:\n" + "\n".join(f"  - {error}" for error in errors))
