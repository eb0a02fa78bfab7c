"""
TDM Simulator - replays an assignment table over repeating frames.

Each demand pair owns a FIFO queue. Packets arrive at slot boundaries; in
slot τ every grant (pair, λ, τ) sends one queued packet of its pair. A
packet's delay is the number of slots between its arrival and its send.
"""
from collections import defaultdict, deque
from itertools import combinations
from typing import Deque, Dict, Iterable, List, Optional, Tuple

import numpy as np

from ponfabric.models.assignment import AssignmentTable, DemandSet
from ponfabric.models.fabric import FabricModel, Topology
from ponfabric.models.simulation import (
    AuditVerdict,
    CollisionBreach,
    FiberMetrics,
    Metrics,
    PairMetrics,
    SummaryRow,
    TrafficModel,
    Transmission,
)
from ponfabric.rwta_service import build_demands, check_table
from ponfabric.topology_service import port_path
from ponfabric.utils.errors import ConfigError, InvalidTable
from ponfabric.utils.logger import logger


class TdmSimulator:
    """
    Slot-by-slot simulator for static TDM-WDM grant tables.
    Runs share nothing, so separate runs may execute concurrently.
    """

    def simulate(
        self,
        topology: Topology,
        table: AssignmentTable,
        traffic: TrafficModel,
        frames: int,
        demands: Optional[DemandSet] = None,
        trace: bool = False,
        strict_transceivers: bool = False,
        dedicated_wavelengths: bool = False,
    ) -> Metrics:
        """
        Runs `frames` frames of T slots each.

        Args:
            topology: fabric and entities
            table: grants to replay; must validate against `demands`
            traffic: arrival process and its seed
            frames: number of frames to run
            demands: pairs that receive traffic (default: build_demands(topology))
            trace: keep every transmission for collision_audit
            strict_transceivers, dedicated_wavelengths: validation flags, as for check_table

        Returns:
            Metrics for every demand pair and every attachment fiber

        Raises:
            ConfigError: if frames < 1
            UnknownEntity: if a hotspot target is not in the topology
            InvalidTable: if the table does not validate
        """
        if frames < 1:
            raise ConfigError(f"frames must be ≥ 1 (got: {frames})")
        if traffic.kind == "hotspot":
            topology.entity(traffic.target)

        demands = demands if demands is not None else build_demands(topology)
        report = check_table(
            topology,
            demands,
            table,
            strict_transceivers=strict_transceivers,
            dedicated_wavelengths=dedicated_wavelengths,
        )
        if not report.valid:
            raise InvalidTable(report)

        slots = topology.time_slots
        pairs = demands.pairs
        rng = np.random.default_rng(traffic.seed)

        grants_at: List[List[Tuple[int, int]]] = [[] for _ in range(slots)]
        grants = [0] * len(pairs)
        for record in table.assignments:
            index = demands.position(record.pair)
            grants_at[record.timeslot - 1].append((index, record.wavelength))
            grants[index] += 1
        for slot_grants in grants_at:
            slot_grants.sort()

        src_attachment = [topology.attachment_of(src) for src, _ in pairs]
        dst_attachment = [topology.attachment_of(dst) for _, dst in pairs]
        hot = np.array([traffic.kind == "hotspot" and dst == traffic.target for _, dst in pairs], dtype=bool)

        queues: List[Deque[int]] = [deque() for _ in pairs]
        offered = np.zeros(len(pairs), dtype=np.int64)
        delivered = np.zeros(len(pairs), dtype=np.int64)
        delay_sum = np.zeros(len(pairs), dtype=np.int64)
        delay_max = np.zeros(len(pairs), dtype=np.int64)
        uplink = np.zeros(topology.n, dtype=np.int64)
        downlink = np.zeros(topology.n, dtype=np.int64)
        transmissions: List[Transmission] = []

        for frame in range(frames):
            for slot in range(slots):
                now = frame * slots + slot
                arrivals = self._arrivals(traffic, slot, len(pairs), hot, rng)
                for index in np.flatnonzero(arrivals):
                    queues[index].extend([now] * int(arrivals[index]))
                offered += arrivals

                for index, wavelength in grants_at[slot]:
                    if not queues[index]:
                        continue
                    delay = now - queues[index].popleft()
                    delivered[index] += 1
                    delay_sum[index] += delay
                    delay_max[index] = max(delay_max[index], delay)
                    uplink[src_attachment[index]] += 1
                    downlink[dst_attachment[index]] += 1
                    if trace:
                        src, dst = pairs[index]
                        transmissions.append(Transmission(
                            frame=frame,
                            timeslot=slot + 1,
                            wavelength=wavelength,
                            src=src,
                            dst=dst,
                            src_attachment=src_attachment[index],
                        ))

        capacity = topology.wavelengths * slots * frames
        fibers = []
        for attachment in topology.attachments:
            for direction, occupied in (("up", uplink), ("down", downlink)):
                fibers.append(FiberMetrics(
                    attachment=attachment.index,
                    label=attachment.label,
                    direction=direction,
                    occupied=int(occupied[attachment.index]),
                    capacity=capacity,
                ))

        metrics = Metrics(
            frames=frames,
            time_slots=slots,
            traffic=traffic.describe(),
            pairs=tuple(
                PairMetrics(
                    src=src,
                    dst=dst,
                    grants=grants[index],
                    offered=int(offered[index]),
                    delivered=int(delivered[index]),
                    queued=len(queues[index]),
                    mean_delay=float(delay_sum[index] / delivered[index]) if delivered[index] else 0.0,
                    max_delay=int(delay_max[index]),
                )
                for index, (src, dst) in enumerate(pairs)
            ),
            fibers=tuple(fibers),
            trace=tuple(transmissions) if trace else None,
        )

        logger.info(
            f"Simulated {frames} frames of {traffic.describe()}: "
            f"offered {metrics.offered}, delivered {metrics.delivered}, queued {metrics.queued}"
        )
        return metrics

    @staticmethod
    def _arrivals(
        traffic: TrafficModel,
        slot: int,
        pair_count: int,
        hot: np.ndarray,
        rng: np.random.Generator,
    ) -> np.ndarray:
        if traffic.kind == "bernoulli":
            return (rng.random(pair_count) < traffic.probability).astype(np.int64)

        if slot != 0:
            return np.zeros(pair_count, dtype=np.int64)

        if traffic.kind == "uniform":
            return np.full(pair_count, traffic.packets, dtype=np.int64)

        whole = int(traffic.multiplier)
        extra = rng.random(pair_count) < (traffic.multiplier - whole)
        return np.where(hot, whole + extra, 1).astype(np.int64)

    def collision_audit(self, fabric: FabricModel, trace: Iterable[Transmission]) -> AuditVerdict:
        """
        Checks that no two transmissions in the same (frame, τ) on the same
        wavelength share a segment of their lightpaths. One breach is
        reported per colliding pair of transmissions.
        """
        groups: Dict[Tuple[int, int, int], List[Transmission]] = defaultdict(list)
        count = 0
        for transmission in trace:
            groups[(transmission.frame, transmission.timeslot, transmission.wavelength)].append(transmission)
            count += 1

        breaches = []
        for key in sorted(groups):
            members = groups[key]
            paths = [port_path(fabric, t.src_attachment, t.wavelength) for t in members]
            for (i, first), (j, second) in combinations(enumerate(members), 2):
                other = set(paths[j])
                shared = tuple(segment for segment in paths[i] if segment in other)
                if shared:
                    breaches.append(CollisionBreach(first=first, second=second, shared=shared))

        if breaches:
            logger.warning(f"Collision audit found {len(breaches)} breaches in {count} transmissions")
        return AuditVerdict(transmissions=count, breaches=tuple(breaches))

    def utilization_summary(self, metrics: Metrics) -> List[SummaryRow]:
        """Per-fiber utilization rows followed by the mean over all fibers."""
        rows = [
            SummaryRow("fiber", f"{fiber.label}.{fiber.direction}", fiber.utilization)
            for fiber in metrics.fibers
        ]
        aggregate = sum(row.value for row in rows) / len(rows) if rows else 0.0
        rows.append(SummaryRow("aggregate", "utilization", aggregate))
        return rows


# Create singleton instance
tdm_simulator = TdmSimulator()
