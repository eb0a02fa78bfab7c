"""
Data models for the data-center topology and the two-plane AWGR fabric.
"""
from enum import Enum
from typing import Dict, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr

from ponfabric.config import TopologyConfig
from ponfabric.utils.errors import RangeError, UnknownEntity


class EntityKind(str, Enum):
    RACK = "rack"
    OLT = "olt"


class Entity(BaseModel):
    """A rack inside a cell, or an OLT switch."""
    model_config = ConfigDict(frozen=True)

    kind: EntityKind
    cell_index: Optional[int] = None
    local_index: int
    name: str

    @property
    def is_olt(self) -> bool:
        return self.kind is EntityKind.OLT


class Attachment(BaseModel):
    """
    A port group of the AWGR fabric. A cell's special server is modeled
    purely as the attachment all of its racks share.
    """
    model_config = ConfigDict(frozen=True)

    index: int
    label: str
    hosted_entities: Tuple[str, ...]


class FabricModel(BaseModel):
    """
    The deterministic wavelength-routing function of the cascaded AWGR planes.

    Wavelengths are labeled 1..W with W = planes * n. Wavelength λ carries a
    cyclic port offset of (λ-1) mod n inside plane (λ-1) div n.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    planes: int = 2

    @property
    def wavelengths(self) -> int:
        return self.planes * self.n

    def check_wavelength(self, wavelength: int) -> None:
        if not 1 <= wavelength <= self.wavelengths:
            raise RangeError(f"wavelength λ{wavelength} outside 1..{self.wavelengths}")

    def check_attachment(self, attachment: int) -> None:
        if not 0 <= attachment < self.n:
            raise RangeError(f"attachment {attachment} outside 0..{self.n - 1}")

    def offset_of(self, wavelength: int) -> int:
        self.check_wavelength(wavelength)
        return (wavelength - 1) % self.n

    def plane_of(self, wavelength: int) -> int:
        self.check_wavelength(wavelength)
        return (wavelength - 1) // self.n

    def wavelength_for(self, offset: int, plane: int) -> int:
        """Inverse of (offset_of, plane_of)."""
        return plane * self.n + offset + 1


class Topology(BaseModel):
    """Entities, their attachments, the fabric, and the TDM frame length."""
    model_config = ConfigDict(frozen=True)

    config: TopologyConfig
    entities: Tuple[Entity, ...]
    attachments: Tuple[Attachment, ...]
    fabric: FabricModel
    time_slots: int

    _by_name: Dict[str, Entity] = PrivateAttr(default_factory=dict)
    _attachment_of: Dict[str, int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context) -> None:
        self._by_name = {entity.name: entity for entity in self.entities}
        self._attachment_of = {
            name: attachment.index
            for attachment in self.attachments
            for name in attachment.hosted_entities
        }

    @property
    def n(self) -> int:
        return self.fabric.n

    @property
    def wavelengths(self) -> int:
        return self.fabric.wavelengths

    def entity(self, name: str) -> Entity:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownEntity(f"unknown entity '{name}'") from None

    def has_entity(self, name: str) -> bool:
        return name in self._by_name

    def attachment_of(self, name: str) -> int:
        """Attachment index hosting the named entity."""
        self.entity(name)
        return self._attachment_of[name]

    def entity_index(self, name: str) -> int:
        """Position of the entity in the canonical entity order."""
        return self.entities.index(self.entity(name))

    def with_time_slots(self, time_slots: int) -> "Topology":
        """Same fabric and entities with a different frame length."""
        config = self.config.model_copy(update={"time_slots": time_slots})
        config.validate_bounds()
        return self.model_copy(update={"config": config, "time_slots": time_slots})


class Segment(NamedTuple):
    """One hop of a lightpath; equal segments at equal (λ, τ) collide."""
    kind: str
    plane: int
    port: int


class PairReach(BaseModel):
    model_config = ConfigDict(frozen=True)

    src: int
    dst: int
    wavelengths: Tuple[int, ...]


class ReachabilityReport(BaseModel):
    """Which wavelengths connect each ordered attachment pair."""
    model_config = ConfigDict(frozen=True)

    n: int
    pairs: Tuple[PairReach, ...]
    failures: Tuple[str, ...] = ()

    @property
    def success(self) -> bool:
        return not self.failures

    def wavelengths_between(self, src: int, dst: int) -> Tuple[int, ...]:
        return self.pairs[src * self.n + dst].wavelengths
