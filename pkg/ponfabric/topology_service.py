"""
Topology Service - builds the data-center model and answers routing queries
on the two-plane, two-tier cascaded AWGR fabric.

Attachments are ordered cells first, then OLTs. Wavelength λ sent from
attachment a arrives at (a + (λ-1) mod N) mod N in plane (λ-1) div N.
Tier 1 applies the cyclic shift; tier 2 passes straight through its plane.
"""
from typing import List, Tuple

from ponfabric.config import TopologyConfig
from ponfabric.models.fabric import (
    Attachment,
    Entity,
    EntityKind,
    FabricModel,
    PairReach,
    ReachabilityReport,
    Segment,
    Topology,
)
from ponfabric.utils.errors import ConfigError
from ponfabric.utils.logger import logger


def rack_name(cell: int, rack: int) -> str:
    return f"cell{cell}.rack{rack}"


def olt_name(olt: int) -> str:
    return f"olt{olt}"


def build_topology(config: TopologyConfig) -> Topology:
    """
    Builds cells of racks, OLT switches and the fabric connecting them.

    Args:
        config: cells, racks_per_cell, olts, time_slots, planes

    Returns:
        Topology with N = cells + olts attachments and W = 2N wavelengths

    Raises:
        ConfigError: if any bound is violated
    """
    config.validate_bounds()

    entities: List[Entity] = []
    attachments: List[Attachment] = []

    for cell in range(1, config.cells + 1):
        hosted = []
        for rack in range(1, config.racks_per_cell + 1):
            name = rack_name(cell, rack)
            entities.append(Entity(kind=EntityKind.RACK, cell_index=cell, local_index=rack, name=name))
            hosted.append(name)
        attachments.append(Attachment(index=len(attachments), label=f"cell{cell}", hosted_entities=tuple(hosted)))

    for olt in range(1, config.olts + 1):
        name = olt_name(olt)
        entities.append(Entity(kind=EntityKind.OLT, local_index=olt, name=name))
        attachments.append(Attachment(index=len(attachments), label=name, hosted_entities=(name,)))

    fabric = FabricModel(n=len(attachments), planes=config.planes)
    topology = Topology(
        config=config,
        entities=tuple(entities),
        attachments=tuple(attachments),
        fabric=fabric,
        time_slots=config.time_slots,
    )

    logger.info(
        f"Built topology: {len(entities)} entities, N={fabric.n}, "
        f"W={fabric.wavelengths}, T={config.time_slots}"
    )
    return topology


def required_wavelengths(n: int, include_intra_cell: bool = True) -> int:
    """
    Wavelengths a WDM build needs: 2N, or 2(N-1) when intra-cell traffic
    does not cross the fabric.

    Raises:
        ConfigError: if n < 2
    """
    if n < 2:
        raise ConfigError(f"attachment count must be ≥ 2 (got: {n})")
    return 2 * n if include_intra_cell else 2 * (n - 1)


def route(fabric: FabricModel, src_attachment: int, wavelength: int) -> Tuple[int, int]:
    """
    Destination attachment and plane reached by `wavelength` from `src_attachment`.

    Raises:
        RangeError: on an out-of-range wavelength or attachment
    """
    fabric.check_attachment(src_attachment)
    offset = fabric.offset_of(wavelength)
    return (src_attachment + offset) % fabric.n, fabric.plane_of(wavelength)


def port_path(fabric: FabricModel, src_attachment: int, wavelength: int) -> List[Segment]:
    """
    Every segment a lightpath occupies, from the source uplink to the
    destination downlink.
    """
    dst, plane = route(fabric, src_attachment, wavelength)
    shifted = (src_attachment + fabric.offset_of(wavelength)) % fabric.n
    return [
        Segment("uplink", plane, src_attachment),
        Segment("tier1_in", plane, src_attachment),
        Segment("tier1_out", plane, shifted),
        Segment("inter_tier", plane, shifted),
        Segment("tier2_in", plane, shifted),
        Segment("tier2_out", plane, dst),
        Segment("downlink", plane, dst),
    ]


def all_to_all_check(topology: Topology) -> ReachabilityReport:
    """
    Enumerates route over every (attachment, λ) and checks that each ordered
    attachment pair is reached by exactly two wavelengths, one per plane,
    N apart.
    """
    fabric = topology.fabric
    n = fabric.n
    reach: List[List[int]] = [[] for _ in range(n * n)]

    for src in range(n):
        for wavelength in range(1, fabric.wavelengths + 1):
            dst, _ = route(fabric, src, wavelength)
            reach[src * n + dst].append(wavelength)

    failures = []
    for src in range(n):
        for dst in range(n):
            found = reach[src * n + dst]
            planes = {fabric.plane_of(wavelength) for wavelength in found}
            if len(found) != 2 or len(planes) != 2 or found[1] - found[0] != n:
                failures.append(f"attachments {src}->{dst} reached by {found}")

    report = ReachabilityReport(
        n=n,
        pairs=tuple(
            PairReach(src=src, dst=dst, wavelengths=tuple(reach[src * n + dst]))
            for src in range(n)
            for dst in range(n)
        ),
        failures=tuple(failures),
    )

    if report.success:
        logger.info(f"All-to-all check passed for N={n}")
    else:
        logger.warning(f"All-to-all check failed for {len(failures)} attachment pairs")
    return report
