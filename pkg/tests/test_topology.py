"""Tests for the region builder and topology model."""

from dataclasses import replace

import numpy as np
import pytest

from pyras.exception_classes import RasConfigError
from pyras.models import ServerTypeSpec
from pyras.topology import build_region


def test_reference_layout(reference_topology):
    """Test the reference region is split evenly at every level."""
    topo = reference_topology
    assert topo.num_servers == 1000
    assert len(topo.msbs_by_dc) == 3
    assert all(len(msbs) == 5 for msbs in topo.msbs_by_dc)
    assert all(len(racks) == 5 for racks in topo.racks_by_msb)
    sizes = [len(servers) for servers in topo.servers_by_rack]
    assert sizes[:25] == [14] * 25
    assert sizes[25:] == [13] * 50


def test_per_type_rack_counts_differ_by_one(reference_topology):
    """Test each type is dealt round-robin over racks."""
    for e in range(reference_topology.num_types):
        capacity = reference_topology.rack_type_capacity(e)
        assert capacity.max() - capacity.min() <= 1


def test_servers_in_dc_for_type(reference_topology):
    """Test the look-up of type 4 servers in datacenter 0."""
    servers = reference_topology.servers_in("dc", 0, type_id=4)
    assert len(servers) == 100
    assert list(servers) == sorted(servers)
    assert all(reference_topology.servers[b].dc_id == 0 for b in servers)


def test_partitions_cover_every_server_once(small_topology):
    """Test racks, MSBs and DCs each partition the servers."""
    for scope, count in (
        ("rack", small_topology.num_racks),
        ("msb", small_topology.num_msbs),
        ("dc", small_topology.num_dcs),
    ):
        cells = [small_topology.servers_in(scope, i) for i in range(count)]
        flat = [b for cell in cells for b in cell]
        assert sorted(flat) == list(range(small_topology.num_servers))


def test_hierarchy_is_consistent(small_topology):
    """Test a server's rack lies in its MSB and that MSB in its DC."""
    for server in small_topology.servers:
        assert server.rack_id in small_topology.racks_by_msb[server.msb_id]
        assert server.msb_id in small_topology.msbs_by_dc[server.dc_id]
    assert np.array_equal(
        small_topology.rack_msb[small_topology.server_rack], small_topology.server_msb
    )


def test_degenerate_single_rack(config_factory):
    """Test one DC with one MSB and one rack holds every server."""
    topo = build_region(
        config_factory(num_msbs=1, num_racks=1, types=((4, 0.0, 0),)).region
    )
    assert topo.servers_by_rack == ((0, 1, 2, 3),)
    assert topo.servers_by_msb == ((0, 1, 2, 3),)


def test_servers_in_out_of_range(small_topology):
    """Test look-ups outside the partition fail."""
    with pytest.raises(ValueError, match="out of range"):
        small_topology.servers_in("msb", 6)
    with pytest.raises(ValueError):
        small_topology.servers_in("zone", 0)


def test_indivisible_hierarchy(config_factory):
    """Test MSBs that cannot be split evenly over DCs are refused."""
    config = config_factory(num_dcs=3, num_msbs=4, num_racks=4)
    with pytest.raises(RasConfigError, match="msbs"):
        build_region(config.region)


def test_type_counts_must_match_servers(config_factory):
    """Test type rows adding up to the wrong server count are refused."""
    config = config_factory()
    region = replace(config.region, num_servers=5)
    with pytest.raises(RasConfigError, match="sum to 4"):
        build_region(region)


def test_missing_combo(config_factory):
    """Test a type pointing at a missing combination is refused."""
    config = config_factory()
    region = replace(
        config.region,
        server_types=(
            ServerTypeSpec(type_id=0, count=4, mean_arrival_rate=0.5, combo_type=3),
        ),
    )
    with pytest.raises(RasConfigError, match="missing combination"):
        build_region(region)


def test_dump_is_deterministic(small_config):
    """Test two builds of one config serialise identically."""
    first = build_region(small_config.region).dump()
    second = build_region(small_config.region).dump()
    assert first == second
    assert first.startswith("region dcs=3 msbs=6 racks=12 servers=60")


def test_type_capacity_views(small_topology):
    """Test the per-type capacity helpers."""
    assert small_topology.rack_type_capacity(0).tolist() == [3] * 12
    assert small_topology.rack_type_capacity(1).tolist() == [2] * 12
    assert small_topology.msb_type_capacity(1).tolist() == [4] * 6
    assert small_topology.type_rru_total(0) == 36 * 150
    assert small_topology.type_mean_rru(1) == 150.0
    assert len(small_topology.type_servers(1)) == 24
