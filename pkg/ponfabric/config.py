"""
Configuration management for the fabric toolkit.
Loads the line-based `key = value` config file into pydantic section models.

File layout:

    [topology]            cells, racks_per_cell, olts
    [resources]           time_slots, planes
    [demands]             include_intra_cell, include_olt_pairs
    [solver]              kind, seed, node_budget, strict_transceivers
    [simulation]          seed

`;` starts a comment. Keys are case-sensitive; unknown sections and keys are
rejected with the offending line number.
"""
import hashlib
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Type, Union

from pydantic import BaseModel, ConfigDict, ValidationError

from ponfabric.utils.errors import ConfigError
from ponfabric.utils.logger import logger


DEFAULT_TIME_SLOTS = 10
FABRIC_PLANES = 2


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TopologySection(_Section):
    cells: int
    racks_per_cell: int
    olts: int = 0


class ResourcesSection(_Section):
    time_slots: int = DEFAULT_TIME_SLOTS
    planes: int = FABRIC_PLANES


class DemandsSection(_Section):
    include_intra_cell: bool = True
    include_olt_pairs: bool = False


class SolverSection(_Section):
    kind: Literal["exact", "greedy", "wdm"] = "exact"
    seed: int = 0
    node_budget: Optional[int] = None
    strict_transceivers: bool = False


class SimulationSection(_Section):
    seed: int = 0


SECTION_MODELS: Dict[str, Type[_Section]] = {
    "topology": TopologySection,
    "resources": ResourcesSection,
    "demands": DemandsSection,
    "solver": SolverSection,
    "simulation": SimulationSection,
}


def _raise_errors(errors: List[str]) -> None:
    if errors:
        raise ConfigError("Configuration errors:\n" + "\n".join(f"  - {error}" for error in errors))


class TopologyConfig(_Section):
    """Everything build_topology needs: the [topology] and [resources] values."""

    cells: int
    racks_per_cell: int
    olts: int = 0
    time_slots: int = DEFAULT_TIME_SLOTS
    planes: int = FABRIC_PLANES

    def validate_bounds(self) -> None:
        """
        Checks every bound and reports all problems at once.

        Raises:
            ConfigError: naming each offending field
        """
        _raise_errors(self.bound_errors())

    def bound_errors(self) -> List[str]:
        errors = []

        if self.cells < 1:
            errors.append("cells must be ≥ 1")

        if self.racks_per_cell < 1:
            errors.append("racks_per_cell must be ≥ 1")

        if self.olts < 0:
            errors.append("olts must be ≥ 0")

        if self.cells + self.olts < 2:
            errors.append(f"cells + olts must be ≥ 2 (got: {self.cells + self.olts})")

        if self.time_slots < 1:
            errors.append("time_slots must be ≥ 1")

        if self.planes != FABRIC_PLANES:
            errors.append(f"planes must be {FABRIC_PLANES} (got: {self.planes})")

        return errors

    def fingerprint(self) -> str:
        """Short stable hash used to tag tables with the instance they came from."""
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()[:16]


class FabricConfig(_Section):
    """A whole config file, one attribute per section."""

    topology: TopologySection
    resources: ResourcesSection = ResourcesSection()
    demands: DemandsSection = DemandsSection()
    solver: SolverSection = SolverSection()
    simulation: SimulationSection = SimulationSection()

    @property
    def topology_config(self) -> TopologyConfig:
        return TopologyConfig(
            cells=self.topology.cells,
            racks_per_cell=self.topology.racks_per_cell,
            olts=self.topology.olts,
            time_slots=self.resources.time_slots,
            planes=self.resources.planes,
        )

    def validate_bounds(self) -> None:
        errors = self.topology_config.bound_errors()

        if self.solver.node_budget is not None and self.solver.node_budget < 1:
            errors.append("node_budget must be ≥ 1")

        _raise_errors(errors)


def _first_error(section: str, error: ValidationError, lines: Dict[Tuple[str, str], int]) -> str:
    detail = error.errors()[0]
    key = str(detail["loc"][0]) if detail["loc"] else "?"
    if detail["type"] == "missing":
        return f"[{section}] missing required key '{key}'"
    where = lines.get((section, key))
    prefix = f"line {where}: " if where is not None else ""
    return f"{prefix}[{section}] {key}: {detail['msg']}"


def parse_config(text: str) -> FabricConfig:
    """
    Parses config text into a FabricConfig and checks its bounds.

    Args:
        text: Contents of a config file

    Returns:
        Validated FabricConfig

    Raises:
        ConfigError: on syntax errors, unknown sections/keys, bad values or bounds
    """
    raw: Dict[str, Dict[str, str]] = {}
    lines: Dict[Tuple[str, str], int] = {}
    current: Optional[str] = None

    for number, original in enumerate(text.splitlines(), start=1):
        line = original.split(";", 1)[0].strip()
        if not line:
            continue

        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in SECTION_MODELS:
                raise ConfigError(f"line {number}: unknown section [{current}]")
            if current in raw:
                raise ConfigError(f"line {number}: section [{current}] appears twice")
            raw[current] = {}
            continue

        if current is None:
            raise ConfigError(f"line {number}: '{line}' appears before any section")

        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {number}: expected 'key = value'")
        if key not in SECTION_MODELS[current].model_fields:
            raise ConfigError(f"line {number}: unknown key '{key}' in [{current}]")
        if key in raw[current]:
            raise ConfigError(f"line {number}: key '{key}' repeated in [{current}]")
        if not value:
            raise ConfigError(f"line {number}: key '{key}' has no value")

        raw[current][key] = value
        lines[(current, key)] = number

    if "topology" not in raw:
        raise ConfigError("missing required section [topology]")

    sections = {}
    for name, values in raw.items():
        try:
            sections[name] = SECTION_MODELS[name].model_validate(values)
        except ValidationError as e:
            raise ConfigError(_first_error(name, e, lines)) from e

    config = FabricConfig(**sections)
    config.validate_bounds()
    return config


def load_config(path: Union[str, Path]) -> FabricConfig:
    """
    Reads and parses a config file.

    Raises:
        ConfigError: if the file cannot be read or is not a valid config
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from e

    config = parse_config(text)
    logger.info(f"Loaded config {path} (fingerprint {config.topology_config.fingerprint()})")
    return config
