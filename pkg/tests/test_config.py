import pytest

from ponfabric.config import TopologyConfig, load_config, parse_config
from ponfabric.utils.errors import ConfigError


def test_defaults_fill_missing_keys():
    config = parse_config("[topology]\ncells = 2\nracks_per_cell = 2\n")

    assert config.topology.olts == 0
    assert config.resources.time_slots == 10
    assert config.resources.planes == 2
    assert config.demands.include_intra_cell is True
    assert config.demands.include_olt_pairs is False
    assert config.solver.kind == "exact"
    assert config.solver.seed == 0
    assert config.solver.node_budget is None
    assert config.solver.strict_transceivers is False


def test_fixture_file_loads(fixtures_dir):
    config = load_config(fixtures_dir / "small.ini")

    assert config.topology_config == TopologyConfig(cells=2, racks_per_cell=2, olts=2, time_slots=10)


def test_comments_and_booleans():
    text = """
    ; leading comment
    [topology]
    cells = 3        ; trailing comment
    racks_per_cell = 1
    [demands]
    include_olt_pairs = true
    """
    config = parse_config(text)

    assert config.topology.cells == 3
    assert config.demands.include_olt_pairs is True


def test_unknown_key_names_line_and_key():
    with pytest.raises(ConfigError, match=r"line 4: unknown key 'rack_per_cell'"):
        parse_config("[topology]\ncells = 2\nolts = 1\nrack_per_cell = 2\n")


def test_keys_are_case_sensitive():
    with pytest.raises(ConfigError, match="unknown key 'Cells'"):
        parse_config("[topology]\nCells = 2\nracks_per_cell = 2\n")


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match=r"line 3: unknown section \[fabric\]"):
        parse_config("[topology]\ncells = 2\n[fabric]\n")


def test_bad_value_names_line_and_key():
    with pytest.raises(ConfigError, match=r"line 3: \[topology\] racks_per_cell"):
        parse_config("[topology]\ncells = 2\nracks_per_cell = two\n")


def test_missing_required_key():
    with pytest.raises(ConfigError, match="missing required key 'racks_per_cell'"):
        parse_config("[topology]\ncells = 2\n")


def test_key_before_section():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("cells = 2\n")


def test_repeated_key():
    with pytest.raises(ConfigError, match="repeated"):
        parse_config("[topology]\ncells = 2\ncells = 3\nracks_per_cell = 1\n")


def test_bounds_reported_together():
    with pytest.raises(ConfigError) as info:
        parse_config("[topology]\ncells = 0\nracks_per_cell = 0\n[resources]\ntime_slots = 0\nplanes = 3\n")

    message = str(info.value)
    assert "cells must be ≥ 1" in message
    assert "racks_per_cell must be ≥ 1" in message
    assert "time_slots must be ≥ 1" in message
    assert "planes must be 2" in message


def test_unknown_solver_kind():
    with pytest.raises(ConfigError, match="kind"):
        parse_config("[topology]\ncells = 2\nracks_per_cell = 1\n[solver]\nkind = milp\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")


def test_fingerprint_is_stable_and_distinguishes_configs():
    a = TopologyConfig(cells=2, racks_per_cell=2, olts=2)
    b = TopologyConfig(cells=2, racks_per_cell=2, olts=2)
    c = TopologyConfig(cells=2, racks_per_cell=2, olts=2, time_slots=4)

    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()


def test_wdm_solver_kind():
    config = parse_config("[topology]\ncells = 2\nracks_per_cell = 1\n[solver]\nkind = wdm\n")

    assert config.solver.kind == "wdm"
