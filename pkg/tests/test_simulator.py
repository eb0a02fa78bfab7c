import random

import pytest

from ponfabric.models.assignment import AssignmentTable
from ponfabric.models.simulation import TrafficModel, Transmission
from ponfabric.solver_service import solver_service
from ponfabric.tdm_simulator import tdm_simulator
from ponfabric.utils.errors import ConfigError, InvalidTable, UnknownEntity

from tests.conftest import make_instance


@pytest.fixture
def full_table(small_instance):
    return solver_service.solve_exact(small_instance).table


def uniform(packets, seed=0):
    return TrafficModel(kind="uniform", packets=packets, seed=seed)


def fiber(metrics, name):
    return next(f for f in metrics.fibers if f"{f.label}.{f.direction}" == name)


def test_one_packet_per_frame_is_fully_served(small_topology, full_table):
    metrics = tdm_simulator.simulate(small_topology, full_table, uniform(1), frames=100)

    assert metrics.delivered == 28 * 100
    assert metrics.queued == 0
    for pair in metrics.pairs:
        assert pair.delivered == 100
        assert pair.max_delay <= small_topology.time_slots - 1


def test_cell_uplink_utilization(small_topology, full_table):
    metrics = tdm_simulator.simulate(small_topology, full_table, uniform(1), frames=100)

    # ten cell-1 pairs send once per frame over an 8 x 10 grid
    assert fiber(metrics, "cell1.up").utilization == pytest.approx(10 / 80)
    assert fiber(metrics, "cell1.down").utilization == pytest.approx(10 / 80)
    assert fiber(metrics, "olt1.up").utilization == pytest.approx(4 / 80)


def test_no_traffic_means_no_use(small_topology, full_table):
    metrics = tdm_simulator.simulate(small_topology, full_table, uniform(0), frames=10)

    assert metrics.delivered == 0
    assert all(row.value == 0 for row in tdm_simulator.utilization_summary(metrics))


def test_overload_is_capped_by_grants(small_topology, full_table):
    metrics = tdm_simulator.simulate(small_topology, full_table, uniform(3), frames=100)

    for pair in metrics.pairs:
        assert pair.grants == 2
        assert pair.delivered == 2 * 100
        assert pair.queued == 100
        assert pair.offered == 300


def test_single_pair_table_touches_only_its_fibers(small_topology):
    table = AssignmentTable.from_records([("cell1.rack1", "olt1", 3, 5)])
    metrics = tdm_simulator.simulate(small_topology, table, uniform(1), frames=20)

    rows = {row.name: row.value for row in tdm_simulator.utilization_summary(metrics)}
    assert rows["cell1.up"] > 0
    assert rows["olt1.down"] > 0
    assert all(value == 0 for name, value in rows.items() if name not in ("cell1.up", "olt1.down", "utilization"))
    assert rows["utilization"] == pytest.approx((rows["cell1.up"] + rows["olt1.down"]) / 8)


def test_hotspot_multiplies_target_arrivals(small_topology, full_table):
    traffic = TrafficModel(kind="hotspot", target="olt1", multiplier=2.5, seed=3)
    metrics = tdm_simulator.simulate(small_topology, full_table, traffic, frames=50)

    for pair in metrics.pairs:
        if pair.dst == "olt1":
            assert 100 <= pair.offered <= 150
        else:
            assert pair.offered == 50


def test_hotspot_target_must_exist(small_topology, full_table):
    traffic = TrafficModel(kind="hotspot", target="olt9", multiplier=2)

    with pytest.raises(UnknownEntity):
        tdm_simulator.simulate(small_topology, full_table, traffic, frames=1)


def test_invalid_table_rejected(small_topology):
    table = AssignmentTable.from_records([("cell1.rack1", "olt1", 4, 1)])

    with pytest.raises(InvalidTable) as info:
        tdm_simulator.simulate(small_topology, table, uniform(1), frames=1)
    assert info.value.report.codes() == ["V3"]


def test_frames_must_be_positive(small_topology, full_table):
    with pytest.raises(ConfigError):
        tdm_simulator.simulate(small_topology, full_table, uniform(1), frames=0)


def test_same_seed_same_metrics(small_topology, full_table):
    traffic = TrafficModel(kind="bernoulli", probability=0.3, seed=11)

    first = tdm_simulator.simulate(small_topology, full_table, traffic, frames=30, trace=True)
    second = tdm_simulator.simulate(small_topology, full_table, traffic, frames=30, trace=True)

    assert first == second


def test_transmissions_only_on_grants(small_topology, full_table):
    traffic = TrafficModel(kind="bernoulli", probability=0.5, seed=2)
    metrics = tdm_simulator.simulate(small_topology, full_table, traffic, frames=20, trace=True)
    granted = {(a.src, a.dst, a.wavelength, a.timeslot) for a in full_table.assignments}

    assert metrics.trace
    for t in metrics.trace:
        assert (t.src, t.dst, t.wavelength, t.timeslot) in granted


def test_audit_accepts_greedy_table():
    instance = make_instance(2, 2, 2, time_slots=2)
    table = solver_service.solve_greedy(instance, seed=0).table
    metrics = tdm_simulator.simulate(instance.topology, table, uniform(2), frames=10, trace=True)

    verdict = tdm_simulator.collision_audit(instance.topology.fabric, metrics.trace)

    assert verdict.ok
    assert verdict.transmissions == metrics.delivered


def test_audit_flags_shared_uplink(small_topology):
    trace = [
        Transmission(frame=0, timeslot=1, wavelength=3, src="cell1.rack1", dst="olt1", src_attachment=0),
        Transmission(frame=0, timeslot=1, wavelength=3, src="cell1.rack2", dst="olt1", src_attachment=0),
        Transmission(frame=0, timeslot=2, wavelength=3, src="cell1.rack2", dst="olt1", src_attachment=0),
    ]

    verdict = tdm_simulator.collision_audit(small_topology.fabric, trace)

    assert len(verdict.breaches) == 1
    assert verdict.breaches[0].shared[0].kind == "uplink"


def test_randomized_runs_conserve_packets():
    tables = {}
    for run in range(200):
        rng = random.Random(run)
        slots = rng.randint(1, 4)
        instance = make_instance(2, 2, 2, time_slots=slots)
        if slots not in tables:
            tables[slots] = solver_service.solve_greedy(instance, seed=slots).table
        kept = [a for a in tables[slots].assignments if rng.random() < 0.8]
        table = AssignmentTable(assignments=tuple(kept))

        kind = rng.choice(["uniform", "bernoulli", "hotspot"])
        traffic = TrafficModel(
            kind=kind,
            packets=rng.randint(0, 3),
            probability=rng.random(),
            target=rng.choice(["olt1", "cell2.rack1"]) if kind == "hotspot" else None,
            multiplier=rng.uniform(1, 3),
            seed=run,
        )
        frames = rng.randint(1, 12)

        metrics = tdm_simulator.simulate(instance.topology, table, traffic, frames, trace=True)

        for pair in metrics.pairs:
            assert pair.offered == pair.delivered + pair.queued
            assert pair.grants <= 2
            assert pair.delivered <= pair.grants * frames
        assert metrics.offered == metrics.delivered + metrics.queued
        assert all(0 <= f.utilization <= 1 for f in metrics.fibers)
        assert tdm_simulator.collision_audit(instance.topology.fabric, metrics.trace).ok


def test_time_sharing_beats_dedicated_wavelengths(small_instance, full_table):
    topology, demands = small_instance.topology, small_instance.demands
    wdm_table = solver_service.solve_wdm(small_instance).table

    shared = tdm_simulator.simulate(topology, full_table, uniform(1), frames=100, demands=demands)
    dedicated = tdm_simulator.simulate(
        topology, wdm_table, uniform(1), frames=100, demands=demands, dedicated_wavelengths=True,
    )

    assert shared.delivered == 2800
    assert dedicated.delivered == 2400
    assert dedicated.queued == 400
    blocked = [pair for pair in dedicated.pairs if pair.grants == 0]
    assert len(blocked) == 4
    assert all(pair.delivered == 0 and pair.queued == 100 for pair in blocked)
    # an owner sends in the slot its packet arrives
    assert all(pair.max_delay == 0 for pair in dedicated.pairs if pair.grants)
    assert max(pair.max_delay for pair in shared.pairs) > 0

    def aggregate(metrics):
        return tdm_simulator.utilization_summary(metrics)[-1].value

    assert aggregate(shared) > aggregate(dedicated)


def test_dedicated_table_needs_the_flag(small_instance):
    wdm_table = solver_service.solve_wdm(small_instance).table

    with pytest.raises(InvalidTable):
        tdm_simulator.simulate(small_instance.topology, wdm_table, uniform(1), frames=1)
