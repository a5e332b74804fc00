import math
import os
from pathlib import Path

import numpy as np
import pytest

import obstacle_mcf as om

SMALL = """
dim = 2
nodes = 81
extent = 2.0
shape.kind = sphere
shape.center = 0,0
shape.radius = 0.5
epsilon = 0.1
delta = 0.01
scheme = yosida
dt = auto
t_end = 0.002
snapshot_every = 1000
diagnostics_every = 5
"""


def test_potential_basics():
    p = om.Potential(0.1)
    assert p.saturation == pytest.approx(1 / 0.9)
    assert p.value(p.saturation) == pytest.approx(0.0, abs=1e-15)
    assert p.sigma == pytest.approx(om.sigma_delta_closed_form(0.1), rel=1e-10)
    assert om.Potential().sigma == pytest.approx(math.pi / 2)
    assert om.Potential().delta is None


def test_sigma_matches_closed_form():
    for delta in (0.3, 0.01, 1e-4):
        assert om.sigma_delta(delta) == pytest.approx(om.sigma_delta_closed_form(delta), rel=1e-10)


def test_sphere_radius():
    assert om.sphere_radius_exact(1.0, 3, 0.1) == pytest.approx(math.sqrt(0.6))
    with pytest.raises(om.Error):
        om.sphere_radius_exact(0.5, 2, 1.0)


def test_config_round_trip_and_errors():
    canonical = om.parse_config(SMALL)
    assert om.parse_config(canonical) == canonical
    with pytest.raises(om.Error):
        om.parse_config(SMALL.replace("delta = 0.01", "delta = 0.7"))
    with pytest.raises(om.Error):
        om.parse_config(SMALL + "colour = blue\n")
    assert om.stability_limit(SMALL) > 0


def test_shipped_configs_parse():
    config_dir = Path(os.environ.get("OBSTACLE_MCF_CONFIG_DIR", Path(__file__).parents[2] / "tools" / "configs"))
    for cfg in sorted(config_dir.glob("*.cfg")):
        om.parse_config(cfg.read_text())


def test_initial_field_and_zero_level():
    field = om.initial_field(SMALL)
    assert field.shape == (81, 81)
    sat = 1 / (1 - 0.01)
    assert np.all(np.abs(field) <= sat + 1e-12)
    assert field[40, 40] == pytest.approx(sat)
    assert np.allclose(field, field.T)
    vertices = om.zero_level(field, 2.0)
    radii = np.hypot(vertices[:, 0], vertices[:, 1])
    assert np.max(np.abs(radii - 0.5)) < 2.0 / 80


def test_run_in_memory():
    out = om.run(SMALL)
    diags = out["diagnostics"]
    assert diags[0]["t"] == 0.0
    assert diags[-1]["t"] == pytest.approx(0.002)
    energies = [d["total_energy"] for d in diags]
    assert all(b <= a for a, b in zip(energies, energies[1:]))
    t_last, field = out["snapshots"][-1]
    assert t_last == pytest.approx(0.002)
    assert field.shape == (81, 81)


def test_profile_check():
    ok, report = om.profile_check()
    assert ok
    assert report.startswith("{")
