"""
RWTA Service - demands, feasible wavelengths, conflict groups and the
assignment-table validator.

Validation rules:
    V1  unknown entity, self pair, or pair outside the demand set
    V2  wavelength or time slot out of range
    V3  wavelength does not route src's attachment to dst's attachment
    V4  two grants share (source attachment, λ, τ)
    V5  two grants share (destination attachment, λ, τ)
    V6  a pair holds two grants in one plane (not for dedicated-wavelength tables)
    V7  duplicate record
    V8  (strict transceivers only) an entity sends or receives twice in one τ
"""
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Tuple

from ponfabric.models.assignment import (
    Assignment,
    AssignmentTable,
    ConflictKey,
    DemandSet,
    Pair,
    ValidationReport,
    Violation,
)
from ponfabric.models.fabric import Topology
from ponfabric.topology_service import route
from ponfabric.utils.errors import InvalidDemand
from ponfabric.utils.logger import logger


def build_demands(
    topology: Topology,
    include_intra_cell: bool = True,
    include_olt_pairs: bool = False,
) -> DemandSet:
    """
    Every ordered entity pair except self pairs and pairs the flags exclude,
    sorted by (src name, dst name).
    """
    names = sorted(entity.name for entity in topology.entities)
    pairs: List[Pair] = []

    for src_name in names:
        src = topology.entity(src_name)
        for dst_name in names:
            if src_name == dst_name:
                continue
            dst = topology.entity(dst_name)
            if src.is_olt and dst.is_olt and not include_olt_pairs:
                continue
            same_cell = not src.is_olt and not dst.is_olt and src.cell_index == dst.cell_index
            if same_cell and not include_intra_cell:
                continue
            pairs.append((src_name, dst_name))

    logger.info(f"Built {len(pairs)} demands (intra_cell={include_intra_cell}, olt_pairs={include_olt_pairs})")
    return DemandSet(
        pairs=tuple(pairs),
        include_intra_cell=include_intra_cell,
        include_olt_pairs=include_olt_pairs,
    )


def feasible_wavelengths(topology: Topology, pair: Pair) -> Tuple[int, ...]:
    """
    Wavelengths that carry src's traffic to dst, ascending (one per plane).

    Raises:
        UnknownEntity: if either name is not in the topology
        InvalidDemand: for a self pair
    """
    src, dst = pair
    src_attachment = topology.attachment_of(src)
    dst_attachment = topology.attachment_of(dst)
    if src == dst:
        raise InvalidDemand(f"self pair {src}->{dst}")

    fabric = topology.fabric
    offset = (dst_attachment - src_attachment) % fabric.n
    return tuple(fabric.wavelength_for(offset, plane) for plane in range(fabric.planes))


def objective(table: AssignmentTable) -> int:
    """Number of grants in the table (the value being maximized)."""
    return len(table.assignments)


def conflict_groups(topology: Topology, demands: DemandSet) -> Dict[ConflictKey, Tuple[Pair, ...]]:
    """
    Demands contending for each (source fiber, λ) and (destination fiber, λ).
    A group's size is a lower bound on the slots its wavelength needs.
    """
    groups: Dict[ConflictKey, List[Pair]] = defaultdict(list)
    for pair in demands.pairs:
        src_attachment = topology.attachment_of(pair[0])
        dst_attachment = topology.attachment_of(pair[1])
        for wavelength in feasible_wavelengths(topology, pair):
            groups[ConflictKey("src", src_attachment, wavelength)].append(pair)
            groups[ConflictKey("dst", dst_attachment, wavelength)].append(pair)
    return {key: tuple(groups[key]) for key in sorted(groups)}


def slot_lower_bound(topology: Topology, demands: DemandSet, strict_transceivers: bool = False) -> int:
    """
    Fewest time slots that could give every demand both of its grants: the
    largest conflict group and, with strict_transceivers, the most grants
    one entity sends or receives.
    """
    bound = max((len(group) for group in conflict_groups(topology, demands).values()), default=0)
    if strict_transceivers:
        sends = Counter(src for src, _ in demands.pairs)
        receives = Counter(dst for _, dst in demands.pairs)
        busiest = max(list(sends.values()) + list(receives.values()), default=0)
        bound = max(bound, topology.fabric.planes * busiest)
    return bound


def _collisions(
    records: Iterable[Tuple[int, Assignment]],
    key_of,
    code: str,
    describe,
) -> List[Tuple[Violation, List[int]]]:
    buckets: Dict[Tuple, List[Tuple[int, Assignment]]] = defaultdict(list)
    for index, record in records:
        buckets[key_of(record)].append((index, record))

    found = []
    for key, members in buckets.items():
        if len(members) > 1:
            violation = Violation(
                code=code,
                records=tuple(record for _, record in members),
                message=describe(key, len(members)),
            )
            found.append((violation, [index for index, _ in members]))
    return found


def check_table(
    topology: Topology,
    demands: DemandSet,
    table: AssignmentTable,
    strict_transceivers: bool = False,
    dedicated_wavelengths: bool = False,
) -> ValidationReport:
    """
    Validates a table against the fabric and the demand set.

    Never raises for bad records: every finding is a violation in the report.
    The objective counts records involved in no violation. With
    dedicated_wavelengths (WDM-only tables) a pair may hold its wavelength in
    several slots, so V6 is not checked.
    """
    fabric = topology.fabric
    violations: List[Violation] = []
    flagged = set()

    counts = Counter(record.sort_key() for record in table.assignments)
    unique = sorted({record.sort_key(): record for record in table.assignments}.values(), key=Assignment.sort_key)

    for record in unique:
        copies = counts[record.sort_key()]
        if copies > 1:
            violations.append(Violation(
                code="V7",
                records=(record,) * copies,
                message=f"{record.describe()} appears {copies} times",
            ))

    routable: List[Tuple[int, Assignment]] = []
    for index, record in enumerate(unique):
        problems = []

        unknown = [name for name in record.pair if not topology.has_entity(name)]
        if unknown:
            problems.append(("V1", f"{record.describe()} names unknown entity '{unknown[0]}'"))
        elif record.src == record.dst:
            problems.append(("V1", f"{record.describe()} is a self pair"))
        elif record.pair not in demands:
            problems.append(("V1", f"{record.describe()} is not in the demand set"))

        if not 1 <= record.wavelength <= fabric.wavelengths:
            problems.append(("V2", f"{record.describe()} wavelength outside λ1..λ{fabric.wavelengths}"))
        if not 1 <= record.timeslot <= topology.time_slots:
            problems.append(("V2", f"{record.describe()} time slot outside τ1..τ{topology.time_slots}"))

        if not problems:
            src_attachment = topology.attachment_of(record.src)
            dst_attachment = topology.attachment_of(record.dst)
            reached, _ = route(fabric, src_attachment, record.wavelength)
            if reached != dst_attachment:
                problems.append((
                    "V3",
                    f"{record.describe()} λ{record.wavelength} routes attachment "
                    f"{src_attachment} to {reached}, not {dst_attachment}",
                ))

        for code, message in problems:
            violations.append(Violation(code=code, records=(record,), message=message))
        if problems:
            flagged.add(index)
        else:
            routable.append((index, record))

    def attachment_label(index: int) -> str:
        return topology.attachments[index].label

    checks = [
        (
            "V4",
            lambda r: (topology.attachment_of(r.src), r.wavelength, r.timeslot),
            lambda k, m: f"source fiber of {attachment_label(k[0])} carries λ{k[1]} in τ{k[2]} for {m} grants",
        ),
        (
            "V5",
            lambda r: (topology.attachment_of(r.dst), r.wavelength, r.timeslot),
            lambda k, m: f"destination fiber of {attachment_label(k[0])} carries λ{k[1]} in τ{k[2]} for {m} grants",
        ),
    ]
    if not dedicated_wavelengths:
        checks.append((
            "V6",
            lambda r: (r.src, r.dst, fabric.plane_of(r.wavelength)),
            lambda k, m: f"{k[0]}->{k[1]} holds {m} grants in plane {k[2]}",
        ))
    if strict_transceivers:
        checks.extend([
            ("V8", lambda r: ("sends", r.src, r.timeslot), lambda k, m: f"{k[1]} {k[0]} {m} times in τ{k[2]}"),
            ("V8", lambda r: ("receives", r.dst, r.timeslot), lambda k, m: f"{k[1]} {k[0]} {m} times in τ{k[2]}"),
        ])

    for code, key_of, describe in checks:
        for violation, indices in _collisions(routable, key_of, code, describe):
            violations.append(violation)
            flagged.update(indices)

    coverage: Counter = Counter()
    for index, record in routable:
        if index not in flagged:
            coverage[record.pair] += 1
    histogram = Counter(coverage[pair] for pair in demands.pairs)

    report = ValidationReport(
        violations=tuple(sorted(violations, key=Violation.sort_key)),
        objective=sum(coverage.values()),
        coverage=dict(sorted(histogram.items())),
    )

    if report.valid:
        logger.info(f"Table valid: objective {report.objective}")
    else:
        logger.warning(f"Table invalid: {len(report.violations)} violations ({', '.join(report.codes())})")
    return report
