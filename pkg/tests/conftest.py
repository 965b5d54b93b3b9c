"""Fixtures for pyras tests."""

from fractions import Fraction
from pathlib import Path

import pytest

from pyras.config_parser import load_reference_config, serialize_config
from pyras.models import (
    ComboEntry,
    ComboSpec,
    EpisodeConfig,
    ExperimentConfig,
    ObjectiveConfig,
    RegionConfig,
    RegionTopology,
    ServerTypeSpec,
)
from pyras.topology import build_region

# --- Constants ---
RRU = 150
MOVEMENT_COST = 5
SINGLE_COMBO = ((150, 1.0, 2),)
SMALL_COMBOS = (
    ((150, 1.0, 3),),
    ((300, 0.5, 2), (150, 0.5, 4)),
)


def make_config(
    *,
    num_dcs: int = 1,
    num_msbs: int = 2,
    num_racks: int = 2,
    num_reservations: int = 1,
    types: tuple[tuple[int, float, int], ...] = ((4, 0.5, 0),),
    combos: tuple[tuple[tuple[int, float, int], ...], ...] = (SINGLE_COMBO,),
    rru: int = RRU,
    movement_cost: int = MOVEMENT_COST,
    horizon: int = 3,
    lookahead: int = 2,
    seed: int = 0,
    alpha_msb: Fraction = Fraction(1, 15),
    alpha_rack: Fraction = Fraction(1, 75),
    theta: float = 2.0,
    **sections,
) -> ExperimentConfig:
    """Experiment configuration from compact type and combination rows.

    Args:
        types: (count, arrival rate, combination) per server type.
        combos: (demand, probability, duration) entries per combination.
        sections: Optional converter, reward, agent or curriculum sections.
    """
    region = RegionConfig(
        num_dcs=num_dcs,
        num_msbs=num_msbs,
        num_racks=num_racks,
        num_reservations=num_reservations,
        num_servers=sum(count for count, _, _ in types),
        rru=rru,
        movement_cost=movement_cost,
        server_types=tuple(
            ServerTypeSpec(
                type_id=e, count=count, mean_arrival_rate=rate, combo_type=c
            )
            for e, (count, rate, c) in enumerate(types)
        ),
        combos=tuple(
            ComboSpec(tuple(ComboEntry(d, p, dur) for d, p, dur in entries))
            for entries in combos
        ),
    )
    objective = ObjectiveConfig(
        alpha_msb=alpha_msb,
        alpha_rack=alpha_rack,
        kappa=1.0,
        beta=1.0,
        affinity=1.0,
        theta=theta,
    )
    episode = EpisodeConfig(horizon=horizon, lookahead=lookahead, seed=seed)
    return ExperimentConfig(
        region=region, objective=objective, episode=episode, **sections
    )


# --- Fixtures ---


@pytest.fixture
def config_factory():
    """Return the make_config helper."""
    return make_config


@pytest.fixture
def tiny_config() -> ExperimentConfig:
    """One DC, two MSBs with one rack each and four servers of one type.

    Servers 0 and 2 sit in rack/MSB 0, servers 1 and 3 in rack/MSB 1.
    """
    return make_config()


@pytest.fixture
def tiny_topology(tiny_config: ExperimentConfig) -> RegionTopology:
    return build_region(tiny_config.region)


@pytest.fixture
def small_config() -> ExperimentConfig:
    """Three DCs, six MSBs, twelve racks, four reservations, two types."""
    return make_config(
        num_dcs=3,
        num_msbs=6,
        num_racks=12,
        num_reservations=4,
        types=((36, 0.8, 0), (24, 0.5, 1)),
        combos=SMALL_COMBOS,
        horizon=6,
        lookahead=2,
    )


@pytest.fixture
def small_topology(small_config: ExperimentConfig) -> RegionTopology:
    return build_region(small_config.region)


@pytest.fixture(scope="session")
def reference_config() -> ExperimentConfig:
    """The bundled reference configuration."""
    return load_reference_config()


@pytest.fixture(scope="session")
def reference_topology(reference_config: ExperimentConfig) -> RegionTopology:
    return build_region(reference_config.region)


@pytest.fixture
def small_config_file(small_config: ExperimentConfig, tmp_path: Path) -> Path:
    """The small configuration written to an INI file."""
    path = tmp_path / "small.ini"
    path.write_text(serialize_config(small_config), encoding="utf-8")
    return path
