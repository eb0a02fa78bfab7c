"""
Data models for TDM frame simulation: traffic, trace records and metrics.
"""
from typing import Literal, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ponfabric.models.fabric import Segment

# per pair per frame; bounds queue memory
MAX_ARRIVALS = 1_000_000


class TrafficModel(BaseModel):
    """
    Synthetic offered load.

    uniform:  `packets` arrivals per pair at the start of every frame
    bernoulli: one arrival per pair per slot with `probability`
    hotspot:  one arrival per pair per frame, `multiplier` for pairs whose
              destination is `target`
    """
    model_config = ConfigDict(frozen=True)

    kind: Literal["uniform", "bernoulli", "hotspot"]
    packets: int = Field(default=0, ge=0, le=MAX_ARRIVALS)
    probability: float = Field(default=0.0, ge=0.0, le=1.0, allow_inf_nan=False)
    target: Optional[str] = None
    multiplier: float = Field(default=1.0, ge=1.0, le=MAX_ARRIVALS, allow_inf_nan=False)
    seed: int = 0

    @model_validator(mode="after")
    def _hotspot_needs_target(self) -> "TrafficModel":
        if self.kind == "hotspot" and not self.target:
            raise ValueError("hotspot traffic needs a target entity")
        return self

    def describe(self) -> str:
        if self.kind == "uniform":
            return f"uniform:{self.packets}"
        if self.kind == "bernoulli":
            return f"bernoulli:{self.probability:g}"
        return f"hotspot:{self.target}:{self.multiplier:g}"


class Transmission(NamedTuple):
    frame: int
    timeslot: int
    wavelength: int
    src: str
    dst: str
    src_attachment: int


class CollisionBreach(NamedTuple):
    first: Transmission
    second: Transmission
    shared: Tuple[Segment, ...]


class AuditVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    transmissions: int
    breaches: Tuple[CollisionBreach, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.breaches


class PairMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    src: str
    dst: str
    grants: int
    offered: int
    delivered: int
    queued: int
    mean_delay: float
    max_delay: int


class FiberMetrics(BaseModel):
    """Occupancy of one attachment fiber in one direction ("up" or "down")."""
    model_config = ConfigDict(frozen=True)

    attachment: int
    label: str
    direction: Literal["up", "down"]
    occupied: int
    capacity: int

    @property
    def utilization(self) -> float:
        return self.occupied / self.capacity if self.capacity else 0.0


class Metrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    frames: int
    time_slots: int
    traffic: str
    pairs: Tuple[PairMetrics, ...]
    fibers: Tuple[FiberMetrics, ...]
    trace: Optional[Tuple[Transmission, ...]] = None

    @property
    def offered(self) -> int:
        return sum(p.offered for p in self.pairs)

    @property
    def delivered(self) -> int:
        return sum(p.delivered for p in self.pairs)

    @property
    def queued(self) -> int:
        return sum(p.queued for p in self.pairs)


class SummaryRow(NamedTuple):
    scope: str
    name: str
    value: float
