"""
Solver Service - computes wavelength/time-slot tables that maximize the
number of granted connections.

Decision variables are (demand, plane) pairs: the wavelength of each is
fixed by the fabric, so the only choice is a time slot or no grant.
Three solvers are offered:

    exact   depth-first branch-and-bound; values in slot order then
            "no grant". Without transceiver limits variables go in demand
            order then plane and the first optimum found is kept, so ties
            resolve to the lexicographically least table. With them the
            most constrained variable goes next.
    greedy  demands in seed-shuffled order, each plane gets its lowest free slot.
    wdm     WDM-only baseline: every (source fiber, λ) is dedicated to one
            demand for the whole frame.
"""
import time
from collections import defaultdict
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ponfabric.models.assignment import (
    AssignmentTable,
    DemandSet,
    Instance,
    SolveOutcome,
    SolveStatus,
)
from ponfabric.models.fabric import Topology
from ponfabric.rwta_service import feasible_wavelengths, slot_lower_bound
from ponfabric.utils.errors import BudgetExhausted
from ponfabric.utils.logger import logger


class _Variable(NamedTuple):
    src: str
    dst: str
    wavelength: int
    src_attachment: int
    dst_attachment: int
    src_entity: int
    dst_entity: int
    # index of the (source attachment, wavelength) fiber this grant occupies
    group: int


def _variables(instance: Instance) -> Tuple[List[_Variable], int]:
    topology = instance.topology
    groups: Dict[Tuple[int, int], int] = {}
    variables = []

    for pair in instance.demands.pairs:
        src, dst = pair
        src_attachment = topology.attachment_of(src)
        dst_attachment = topology.attachment_of(dst)
        for wavelength in feasible_wavelengths(topology, pair):
            group = groups.setdefault((src_attachment, wavelength), len(groups))
            variables.append(_Variable(
                src=src,
                dst=dst,
                wavelength=wavelength,
                src_attachment=src_attachment,
                dst_attachment=dst_attachment,
                src_entity=topology.entity_index(src),
                dst_entity=topology.entity_index(dst),
                group=group,
            ))

    return variables, len(groups)


def _column(variables: List[_Variable], field: str) -> np.ndarray:
    return np.array([getattr(var, field) for var in variables], dtype=np.int64)


class _SlotGrid:
    """Occupancy bitmaps of every fiber (and, in strict mode, every transceiver) per slot."""

    def __init__(self, instance: Instance, variables: List[_Variable]):
        topology = instance.topology
        n, wavelengths, slots = topology.n, topology.wavelengths, topology.time_slots
        entities = len(topology.entities)

        self.strict = instance.strict_transceivers
        self.src_busy = np.zeros((n, wavelengths, slots), dtype=bool)
        self.dst_busy = np.zeros((n, wavelengths, slots), dtype=bool)
        self.sends = np.zeros((entities, slots), dtype=bool)
        self.receives = np.zeros((entities, slots), dtype=bool)

        self.src_attachment = _column(variables, "src_attachment")
        self.dst_attachment = _column(variables, "dst_attachment")
        self.lane = _column(variables, "wavelength") - 1
        self.src_entity = _column(variables, "src_entity")
        self.dst_entity = _column(variables, "dst_entity")

    def free_slots(self, var: _Variable) -> np.ndarray:
        lane = var.wavelength - 1
        free = ~(self.src_busy[var.src_attachment, lane] | self.dst_busy[var.dst_attachment, lane])
        if self.strict:
            free &= ~(self.sends[var.src_entity] | self.receives[var.dst_entity])
        return free

    def free_matrix(self) -> np.ndarray:
        """free_slots of every variable as one (variables, slots) array."""
        free = ~(
            self.src_busy[self.src_attachment, self.lane]
            | self.dst_busy[self.dst_attachment, self.lane]
        )
        if self.strict:
            free &= ~(self.sends[self.src_entity] | self.receives[self.dst_entity])
        return free

    def first_free(self, var: _Variable, start: int = 0) -> int:
        """Lowest free slot index ≥ start, or -1."""
        candidates = np.flatnonzero(self.free_slots(var)[start:])
        return start + int(candidates[0]) if candidates.size else -1

    def mark(self, var: _Variable, slot: int, busy: bool) -> None:
        lane = var.wavelength - 1
        self.src_busy[var.src_attachment, lane, slot] = busy
        self.dst_busy[var.dst_attachment, lane, slot] = busy
        self.sends[var.src_entity, slot] = busy
        self.receives[var.dst_entity, slot] = busy


def _matching_size(free: np.ndarray) -> int:
    """Maximum matching between rows (variables) and columns (slots)."""
    options = [np.flatnonzero(row).tolist() for row in free if row.any()]
    if len(options) <= 1:
        return len(options)

    owner = [-1] * free.shape[1]

    def augment(row: int, seen: List[bool]) -> bool:
        for slot in options[row]:
            if not seen[slot]:
                seen[slot] = True
                if owner[slot] < 0 or augment(owner[slot], seen):
                    owner[slot] = row
                    return True
        return False

    return sum(augment(row, [False] * free.shape[1]) for row in range(len(options)))


def _resource_families(variables: List[_Variable]) -> List[List[np.ndarray]]:
    """Variables sharing a fiber, a sender and a receiver; each resource grants one per slot."""
    families = []
    for field in ("group", "src_entity", "dst_entity"):
        members: Dict[int, List[int]] = defaultdict(list)
        for index, var in enumerate(variables):
            members[getattr(var, field)].append(index)
        families.append([np.array(indices, dtype=np.int64) for _, indices in sorted(members.items())])
    return families


def _strict_frontier(
    grid: _SlotGrid,
    decided: np.ndarray,
    families: List[List[np.ndarray]],
) -> Tuple[int, int]:
    """
    Bound on further grants and the next variable to branch on.

    Every resource grants at most one variable per slot, so a family's
    further grants are at most the sum of its resources' matchings between
    undecided variables and their free slots. The bound is the smallest
    family sum; the next variable is the undecided one with fewest free slots.
    """
    free = grid.free_matrix()
    free[decided] = False

    undecided = np.flatnonzero(~decided)
    if not undecided.size:
        return 0, -1
    pick = int(undecided[np.argmin(free[undecided].sum(axis=1))])

    bound = min(
        sum(_matching_size(free[members]) for members in family)
        for family in families
    )
    return bound, pick


def _table(instance: Instance, records: List[Tuple[str, str, int, int]]) -> AssignmentTable:
    table = AssignmentTable.from_records(records, fingerprint=instance.topology.config.fingerprint())
    return table.sorted()


def _chosen(variables: List[_Variable], choice: List[int]) -> List[Tuple[str, str, int, int]]:
    return [
        (var.src, var.dst, var.wavelength, slot + 1)
        for var, slot in zip(variables, choice)
        if slot >= 0
    ]


class SolverService:
    """
    Service class for computing assignment tables.
    Pick the algorithm with `kind` ("exact", "greedy" or "wdm") when calling solve().
    """

    def solve(
        self,
        instance: Instance,
        kind: str = "exact",
        seed: int = 0,
        node_budget: Optional[int] = None,
    ) -> SolveOutcome:
        if kind == "exact":
            return self.solve_exact(instance, node_budget)
        elif kind == "greedy":
            return self.solve_greedy(instance, seed)
        elif kind == "wdm":
            return self.solve_wdm(instance)
        else:
            raise ValueError(f"Unsupported solver kind: {kind}")

    def solve_exact(self, instance: Instance, node_budget: Optional[int] = None) -> SolveOutcome:
        """
        Branch-and-bound search for a maximum table.

        The bound adds, for every fiber group, min(unassigned variables in the
        group, free slots on its fiber) to the grants placed so far. A group's
        source fiber carries only that group's variables, so the bound is
        exact at the root when transceivers are not constrained. With
        strict_transceivers the sender and receiver slot limits are bounded
        as well, by matching undecided variables to their free slots.

        Args:
            instance: topology, demands and constraint flags
            node_budget: optional cap on search nodes

        Returns:
            SolveOutcome with status proven-optimal, or bound-reached (best
            table found so far) when the budget ran out

        Raises:
            ConfigError: if the instance is inconsistent
        """
        instance.check_consistency()
        started = time.perf_counter()

        variables, group_count = _variables(instance)
        grid = _SlotGrid(instance, variables)
        slots = instance.time_slots
        total = len(variables)
        strict = instance.strict_transceivers
        families = _resource_families(variables) if strict else []

        groups = _column(variables, "group")
        remaining = np.bincount(groups, minlength=group_count)
        used = np.zeros(group_count, dtype=np.int64)
        decided = np.zeros(total, dtype=bool)

        def frontier(depth: int) -> Tuple[int, int]:
            if strict:
                return _strict_frontier(grid, decided, families)
            return int(np.minimum(remaining, slots - used).sum()), depth

        root_bound, _ = frontier(0)

        choice = [-1] * total
        order = [0] * total
        cursor = [0] * total
        best_count, best_choice = -1, None
        count = nodes = 0
        depth, entering, exhausted = 0, True, False

        while depth >= 0:
            if entering:
                nodes += 1
                if node_budget is not None and nodes > node_budget:
                    exhausted = True
                    break
                if depth == total:
                    if count > best_count:
                        best_count, best_choice = count, list(choice)
                        if best_count == root_bound:
                            break
                    depth, entering = depth - 1, False
                    continue
                bound, pick = frontier(depth)
                if count + bound <= best_count:
                    depth, entering = depth - 1, False
                    continue
                order[depth] = pick
                cursor[depth] = 0
            else:
                index = order[depth]
                var = variables[index]
                remaining[var.group] += 1
                decided[index] = False
                if choice[index] >= 0:
                    grid.mark(var, choice[index], False)
                    used[var.group] -= 1
                    count -= 1
                    choice[index] = -1

            index = order[depth]
            var = variables[index]
            position = cursor[depth]
            slot = grid.first_free(var, position) if position < slots else -1

            if slot >= 0:
                grid.mark(var, slot, True)
                used[var.group] += 1
                count += 1
                choice[index] = slot
                cursor[depth] = slot + 1
            elif position <= slots:
                # no grant for this variable
                cursor[depth] = slots + 1
            else:
                depth, entering = depth - 1, False
                continue

            remaining[var.group] -= 1
            decided[index] = True
            depth, entering = depth + 1, True

        table = _table(instance, _chosen(variables, best_choice or [-1] * total))
        status = SolveStatus.BOUND_REACHED if exhausted else SolveStatus.PROVEN_OPTIMAL
        elapsed = time.perf_counter() - started

        if exhausted:
            logger.warning(f"Exact search hit node budget {node_budget}; best objective so far {len(table)}")
        else:
            logger.info(f"Exact search finished: objective {len(table)}, {nodes} nodes, {elapsed:.3f}s")

        return SolveOutcome(
            table=table,
            objective=len(table),
            status=status,
            nodes=nodes,
            elapsed=elapsed,
            time_slots=slots,
        )

    def solve_greedy(self, instance: Instance, seed: int = 0) -> SolveOutcome:
        """
        First-fit heuristic: demands in an order shuffled by `seed`, and for
        each plane the lowest slot free on both of its fibers.
        """
        instance.check_consistency()
        started = time.perf_counter()

        variables, _ = _variables(instance)
        grid = _SlotGrid(instance, variables)
        planes = instance.topology.fabric.planes
        choice = [-1] * len(variables)

        order = np.random.default_rng(seed).permutation(len(instance.demands))
        for demand in order:
            for plane in range(planes):
                index = int(demand) * planes + plane
                var = variables[index]
                slot = grid.first_free(var)
                if slot >= 0:
                    grid.mark(var, slot, True)
                    choice[index] = slot

        table = _table(instance, _chosen(variables, choice))
        elapsed = time.perf_counter() - started
        logger.info(f"Greedy (seed {seed}) finished: objective {len(table)}, {elapsed:.3f}s")

        return SolveOutcome(
            table=table,
            objective=len(table),
            status=SolveStatus.HEURISTIC,
            nodes=len(variables),
            elapsed=elapsed,
            time_slots=instance.time_slots,
        )

    def solve_wdm(self, instance: Instance) -> SolveOutcome:
        """
        WDM-only baseline without time sharing.

        Each (source fiber, λ) is dedicated to one demand, which holds it in
        every slot of the frame; the other demands of the group are blocked.
        Plane p of a group goes to its p-th demand (wrapping), so the two
        planes serve different demands where the group has more than one.
        With strict_transceivers an entity owns at most one wavelength, as
        it transmits (or receives) in every slot.

        The table only validates with dedicated_wavelengths=True, since an
        owner holds several grants in one plane.
        """
        instance.check_consistency()
        started = time.perf_counter()

        variables, group_count = _variables(instance)
        fabric = instance.topology.fabric
        slots = instance.time_slots

        members: Dict[int, List[int]] = defaultdict(list)
        for index, var in enumerate(variables):
            members[var.group].append(index)

        senders, receivers = set(), set()
        owners = []
        for group in range(group_count):
            candidates = members[group]
            start = fabric.plane_of(variables[candidates[0]].wavelength) % len(candidates)
            for index in candidates[start:] + candidates[:start]:
                var = variables[index]
                if instance.strict_transceivers and (var.src_entity in senders or var.dst_entity in receivers):
                    continue
                owners.append(var)
                senders.add(var.src_entity)
                receivers.add(var.dst_entity)
                break

        records = [
            (var.src, var.dst, var.wavelength, slot)
            for var in owners
            for slot in range(1, slots + 1)
        ]
        table = _table(instance, records)
        elapsed = time.perf_counter() - started
        logger.info(
            f"WDM baseline: {len(owners)} of {group_count} wavelengths dedicated, "
            f"{len({(var.src, var.dst) for var in owners})} of {len(instance.demands)} demands served"
        )

        return SolveOutcome(
            table=table,
            objective=len(table),
            status=SolveStatus.BASELINE,
            nodes=0,
            elapsed=elapsed,
            time_slots=slots,
        )

    def min_slots(
        self,
        topology: Topology,
        demands: DemandSet,
        node_budget: Optional[int] = None,
        strict_transceivers: bool = False,
    ) -> SolveOutcome:
        """
        Smallest frame length at which every demand gets both grants.

        Sweeps T upward with the exact solver, starting at slot_lower_bound
        since no shorter frame can give full coverage. The outcome's
        time_slots is the answer and its table the witness. The topology's
        own T is ignored.

        Raises:
            BudgetExhausted: if one of the exact searches hits node_budget
        """
        time_slots = max(1, slot_lower_bound(topology, demands, strict_transceivers=strict_transceivers))
        while True:
            instance = Instance(
                topology=topology.with_time_slots(time_slots),
                demands=demands,
                strict_transceivers=strict_transceivers,
            )
            outcome = self.solve_exact(instance, node_budget)
            if outcome.status is SolveStatus.BOUND_REACHED:
                raise BudgetExhausted(f"node budget exhausted at T={time_slots}", outcome)
            if outcome.objective == instance.max_objective:
                logger.info(f"Full coverage first reached at T={time_slots}")
                return outcome
            time_slots += 1


# Create singleton instance
solver_service = SolverService()
