"""Tests for configuration files."""

from fractions import Fraction

import pytest

from pyras.config_parser import (
    ConfigFileParser,
    parse_config,
    parse_config_text,
    serialize_config,
)
from pyras.exception_classes import RasConfigError, RasParserError

MINIMAL = """
[region]
num_dcs = 1
num_msbs = 2
num_racks = 2
num_reservations = 1
num_servers = 4
rru = 150
movement_cost = 5

[server_types]
0 = 4, 0.5, 0

[combos]
0 = 150:1.0:2

[objective]
alpha_msb = 1/15
alpha_rack = 1 / 75
kappa = 1.0
beta = 1.0
affinity = 1.0
theta = 2.0

[episode]
horizon = 3
"""


def test_reference_config(reference_config):
    """Test the bundled configuration values."""
    region = reference_config.region
    assert (region.num_dcs, region.num_msbs, region.num_racks) == (3, 15, 75)
    assert region.num_reservations == 20
    assert region.num_servers == 1000
    assert sum(spec.count for spec in region.server_types) == 1000
    assert region.server_types[0].count == 405
    assert region.server_types[0].combo_type == 5
    assert len(region.combos) == 6
    assert region.combos[5].entries[2].duration == 20
    rows = [(s.count, s.mean_arrival_rate, s.combo_type) for s in region.server_types]
    assert rows == [
        (405, 2.0, 5),
        (45, 0.6, 2),
        (30, 0.6, 1),
        (15, 0.2, 0),
        (300, 1.8, 4),
        (15, 0.2, 1),
        (30, 0.6, 2),
        (15, 0.2, 1),
        (45, 0.6, 2),
        (100, 1.2, 3),
    ]
    combos = [
        [(c.demand, c.probability, c.duration) for c in combo.entries]
        for combo in region.combos
    ]
    assert combos == [
        [(150, 1.00, 15)],
        [(300, 0.16, 10), (150, 0.84, 15)],
        [(300, 0.25, 10), (150, 0.75, 15)],
        [(300, 0.33, 10), (150, 0.67, 15)],
        [(450, 0.33, 10), (300, 0.67, 15)],
        [(900, 0.16, 10), (450, 0.33, 15), (150, 0.51, 20)],
    ]
    assert (region.rru, region.movement_cost) == (150, 5)
    assert reference_config.objective.alpha_msb == Fraction(1, 15)
    assert reference_config.objective.alpha_rack == Fraction(1, 75)
    assert reference_config.episode.horizon == 30
    assert reference_config.episode.lookahead == 5


def test_minimal_config_uses_defaults():
    """Test optional sections and keys fall back to defaults."""
    config = parse_config_text(MINIMAL)
    assert config.episode.seed == 0
    assert config.objective.alpha_rack == Fraction(1, 75)
    assert config.converter.omega > 1
    assert config.curriculum.start_stage == 1


def test_round_trip(small_config, reference_config):
    """Test serialised configurations parse back to the same values."""
    for config in (small_config, reference_config):
        text = serialize_config(config)
        parsed = parse_config_text(text)
        assert parsed == config
        assert serialize_config(parsed) == text


def test_empty_text():
    """Test an empty file names every missing section."""
    with pytest.raises(RasConfigError, match="Missing required keys") as err:
        parse_config_text("")
    assert "[region] num_dcs" in str(err.value)
    assert "[episode] horizon" in str(err.value)


def test_missing_key():
    """Test a missing region key is reported."""
    text = MINIMAL.replace("rru = 150\n", "")
    with pytest.raises(RasConfigError, match=r"Missing required keys in \[region\]"):
        parse_config_text(text)
    without_horizon = MINIMAL.replace("horizon = 3", "seed = 1")
    with pytest.raises(RasConfigError, match="horizon"):
        parse_config_text(without_horizon)


def test_unknown_section_and_key():
    """Test typos in section and key names are rejected."""
    with pytest.raises(RasConfigError, match="Unknown sections: extras"):
        parse_config_text(MINIMAL + "\n[extras]\nfoo = 1\n")
    with pytest.raises(RasConfigError, match=r"Unknown keys in \[episode\]: horizn"):
        parse_config_text(MINIMAL + "horizn = 4\n")


def test_ill_typed_values():
    """Test values are checked against their types."""
    with pytest.raises(RasConfigError, match="num_dcs must be int, got 'one'"):
        parse_config_text(MINIMAL.replace("num_dcs = 1", "num_dcs = one"))
    with pytest.raises(RasConfigError, match="alpha_msb must be Fraction"):
        parse_config_text(MINIMAL.replace("alpha_msb = 1/15", "alpha_msb = 1/0"))
    with pytest.raises(RasConfigError, match="count, arrival_rate, combo_type"):
        parse_config_text(MINIMAL.replace("0 = 4, 0.5, 0", "0 = 4, 0.5"))
    with pytest.raises(RasConfigError, match="demand:probability:duration"):
        parse_config_text(MINIMAL.replace("150:1.0:2", "150:1.0"))


def test_combo_ids_in_order():
    """Test combination ids must count up from zero."""
    with pytest.raises(RasConfigError, match="in order"):
        parse_config_text(MINIMAL.replace("0 = 150:1.0:2", "1 = 150:1.0:2"))


def test_invalid_values():
    """Test out-of-range parameters are reported as configuration errors."""
    with pytest.raises(RasConfigError, match="omega must exceed 1"):
        parse_config_text(MINIMAL + "\n[converter]\nomega = 0.5\n")
    with pytest.raises(RasConfigError, match="gamma"):
        parse_config_text(MINIMAL + "\n[rl]\ngamma = 1.0\n")


def test_rl_section():
    """Test the rl section fills agent, reward and curriculum settings."""
    text = MINIMAL + (
        "\n[rl]\nhidden_sizes = 32, 16\naffinity_penalties = 1, 2, 3\n"
        "curriculum_window = 7\nepisodes = 12\n"
    )
    config = parse_config_text(text)
    assert config.agent.hidden_sizes == (32, 16)
    assert config.agent.episodes == 12
    assert config.reward.affinity_penalties == (1.0, 2.0, 3.0)
    assert config.curriculum.window == 7


def test_malformed_text():
    """Test text that is not INI is refused."""
    with pytest.raises(RasConfigError, match="Malformed configuration"):
        ConfigFileParser("num_dcs = 1", "broken.ini").parse()


def test_read_file(small_config_file, small_config, tmp_path):
    """Test configurations are read from disk."""
    assert parse_config(small_config_file) == small_config
    with pytest.raises(RasParserError, match="Cannot read configuration"):
        parse_config(tmp_path / "missing.ini")
