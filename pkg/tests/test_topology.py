import pytest

from ponfabric.config import TopologyConfig
from ponfabric.models.fabric import EntityKind, FabricModel, Segment
from ponfabric.topology_service import (
    all_to_all_check,
    build_topology,
    port_path,
    required_wavelengths,
    route,
)
from ponfabric.utils.errors import ConfigError, RangeError


def ring(n):
    """n single-rack cells: the simplest topology with N = n."""
    return build_topology(TopologyConfig(cells=n, racks_per_cell=1, olts=0))


@pytest.mark.parametrize("cells, racks, olts, slots, entities, n, w", [
    (2, 2, 2, 10, 6, 4, 8),
    (4, 4, 4, 10, 20, 8, 16),
    (2, 1, 0, 2, 2, 2, 4),
])
def test_build_topology_sizes(cells, racks, olts, slots, entities, n, w):
    topology = build_topology(TopologyConfig(cells=cells, racks_per_cell=racks, olts=olts, time_slots=slots))

    assert len(topology.entities) == entities
    assert topology.n == n
    assert topology.wavelengths == w
    assert topology.time_slots == slots


def test_names_and_attachment_order(small_topology):
    names = [entity.name for entity in small_topology.entities]
    assert names == ["cell1.rack1", "cell1.rack2", "cell2.rack1", "cell2.rack2", "olt1", "olt2"]

    labels = [attachment.label for attachment in small_topology.attachments]
    assert labels == ["cell1", "cell2", "olt1", "olt2"]
    assert small_topology.attachments[0].hosted_entities == ("cell1.rack1", "cell1.rack2")
    assert small_topology.attachments[3].hosted_entities == ("olt2",)

    assert small_topology.attachment_of("cell2.rack2") == 1
    assert small_topology.attachment_of("olt1") == 2


def test_entities_carry_cell_index(small_topology):
    rack = small_topology.entity("cell2.rack1")
    olt = small_topology.entity("olt2")

    assert rack.kind is EntityKind.RACK and rack.cell_index == 2 and rack.local_index == 1
    assert olt.kind is EntityKind.OLT and olt.cell_index is None and olt.local_index == 2


def test_every_entity_hosted_exactly_once(large_topology):
    hosted = [name for attachment in large_topology.attachments for name in attachment.hosted_entities]

    assert sorted(hosted) == sorted(entity.name for entity in large_topology.entities)


@pytest.mark.parametrize("fields, message", [
    (dict(cells=0, racks_per_cell=2, olts=2), "cells must be ≥ 1"),
    (dict(cells=2, racks_per_cell=0, olts=2), "racks_per_cell must be ≥ 1"),
    (dict(cells=2, racks_per_cell=1, olts=-1), "olts must be ≥ 0"),
    (dict(cells=1, racks_per_cell=4, olts=0), "cells \\+ olts must be ≥ 2"),
    (dict(cells=2, racks_per_cell=1, olts=0, time_slots=0), "time_slots must be ≥ 1"),
])
def test_build_topology_rejects_bad_bounds(fields, message):
    with pytest.raises(ConfigError, match=message):
        build_topology(TopologyConfig(**fields))


def test_build_topology_is_deterministic():
    config = TopologyConfig(cells=3, racks_per_cell=2, olts=1)

    assert build_topology(config) == build_topology(config)


@pytest.mark.parametrize("n, intra, expected", [(8, True, 16), (8, False, 14), (4, True, 8), (2, True, 4)])
def test_required_wavelengths(n, intra, expected):
    assert required_wavelengths(n, intra) == expected


def test_required_wavelengths_differ_by_two():
    for n in range(2, 40):
        assert required_wavelengths(n, True) - required_wavelengths(n, False) == 2


def test_required_wavelengths_needs_two_attachments():
    with pytest.raises(ConfigError):
        required_wavelengths(1)


def test_route_examples():
    fabric = FabricModel(n=4)

    assert route(fabric, 0, 3) == (2, 0)
    assert route(fabric, 0, 7) == (2, 1)
    for n in (2, 4, 8):
        for a in range(n):
            assert route(FabricModel(n=n), a, 1) == (a, 0)


@pytest.mark.parametrize("src, wavelength", [(0, 0), (0, 9), (4, 1), (-1, 1)])
def test_route_out_of_range(src, wavelength):
    with pytest.raises(RangeError):
        route(FabricModel(n=4), src, wavelength)


def test_port_path_segments():
    fabric = FabricModel(n=4)

    assert port_path(fabric, 0, 1)[-1] == Segment("downlink", 0, 0)
    assert port_path(fabric, 0, 3) == [
        Segment("uplink", 0, 0),
        Segment("tier1_in", 0, 0),
        Segment("tier1_out", 0, 2),
        Segment("inter_tier", 0, 2),
        Segment("tier2_in", 0, 2),
        Segment("tier2_out", 0, 2),
        Segment("downlink", 0, 2),
    ]
    assert port_path(fabric, 3, 6)[-1] == Segment("downlink", 1, 0)


def test_port_path_range_error():
    with pytest.raises(RangeError):
        port_path(FabricModel(n=4), 0, 9)


def test_every_wavelength_is_a_permutation():
    for n in (2, 3, 4, 5, 7, 8, 16, 31, 64):
        fabric = FabricModel(n=n)
        for wavelength in range(1, fabric.wavelengths + 1):
            reached = {route(fabric, a, wavelength)[0] for a in range(n)}
            assert reached == set(range(n))


def test_planes_split_wavelengths_evenly():
    fabric = FabricModel(n=5)
    planes = [fabric.plane_of(wavelength) for wavelength in range(1, 11)]

    assert planes.count(0) == 5 and planes.count(1) == 5


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_all_to_all_multipath(n):
    report = all_to_all_check(ring(n))

    assert report.success
    assert len(report.pairs) == n * n
    for pair in report.pairs:
        low, high = pair.wavelengths
        assert high - low == n


def test_all_to_all_rack_to_olt_pair(small_topology):
    report = all_to_all_check(small_topology)

    assert report.wavelengths_between(0, 2) == (3, 7)


def test_all_to_all_minimal_fabric():
    assert all_to_all_check(ring(2)).wavelengths_between(0, 1) == (2, 4)


def test_all_to_all_reports_broken_fabric():
    # A single-plane build cannot give each pair a second wavelength.
    topology = ring(4)
    single_plane = topology.model_copy(update={"fabric": FabricModel(n=4, planes=1)})

    report = all_to_all_check(single_plane)

    assert not report.success
    assert len(report.failures) == 16


def test_with_time_slots_keeps_structure(small_topology):
    grown = small_topology.with_time_slots(3)

    assert grown.time_slots == 3
    assert grown.config.time_slots == 3
    assert grown.entities == small_topology.entities
    assert grown.attachment_of("olt2") == 3
