from pathlib import Path

import pytest

from ponfabric.config import TopologyConfig
from ponfabric.models.assignment import Instance
from ponfabric.rwta_service import build_demands
from ponfabric.topology_service import build_topology

FIXTURES = Path(__file__).parent / "fixtures"


def make_instance(cells, racks_per_cell, olts, time_slots=10, **flags):
    topology = build_topology(TopologyConfig(
        cells=cells, racks_per_cell=racks_per_cell, olts=olts, time_slots=time_slots,
    ))
    demands = build_demands(
        topology,
        include_intra_cell=flags.get("include_intra_cell", True),
        include_olt_pairs=flags.get("include_olt_pairs", False),
    )
    return Instance(
        topology=topology,
        demands=demands,
        strict_transceivers=flags.get("strict_transceivers", False),
    )


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def small_instance():
    """Two cells of two racks and two OLTs, T=10."""
    return make_instance(2, 2, 2)


@pytest.fixture
def small_topology(small_instance):
    return small_instance.topology


@pytest.fixture
def small_demands(small_instance):
    return small_instance.demands


@pytest.fixture
def tiny_instance():
    """Two cells of one rack each, no OLTs, a single slot."""
    return make_instance(2, 1, 0, time_slots=1)


@pytest.fixture
def large_topology():
    return build_topology(TopologyConfig(cells=4, racks_per_cell=4, olts=4))
