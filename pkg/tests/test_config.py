import pytest
import yaml

from magnonmix.config import COMMANDS, ConfigError, SCHEMA, parse_config
from magnonmix.units import TWO_PI

FIG2 = """
command: lzs-map
drive:
  omega_1_MHz: 0.5
  omega_b_MHz: 0.5
  omega_m_MHz: 0.5
damping:
  gamma_1_MHz: 1.0
  gamma_2_MHz: 2.0
"""


def test_minimal():
    cfg = parse_config("preset: YIG-297K\n", command="kerr-estimate")
    assert cfg.command == "kerr-estimate"
    mat = cfg.material()
    assert mat.M_s == 140e3 and mat.K_c1 == -610.0
    assert cfg.sections["resonator"]["gamma_c_MHz"] == 1.0
    assert cfg.threads == 1


def test_empty_requires_command():
    with pytest.raises(ConfigError):
        parse_config("")
    assert parse_config("", command="verify").command == "verify"


def test_zero_gamma_2_names_field():
    with pytest.raises(ConfigError) as info:
        parse_config("damping:\n  gamma_2_MHz: 0\n", command="simulate")
    assert info.value.path == "damping.gamma_2_MHz"
    assert "gamma_2_MHz" in str(info.value)
    assert info.value.line == 2


def test_fig2_values():
    cfg = parse_config(FIG2)
    d, dp = cfg.lzs_drive(), cfg.damping()
    values = [d.omega_1, d.omega_b, d.omega_m, dp.gamma_1, dp.gamma_2]
    assert [v / (TWO_PI * 1e6) for v in values] == pytest.approx([0.5, 0.5, 0.5, 1.0, 2.0])


def test_unknown_key_location():
    text = "command: simulate\ndamping:\n  gamma_1_MHz: 1.0\n  gama_2_MHz: 2.0\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert (info.value.line, info.value.column) == (4, 3)
    assert "gama_2_MHz" in str(info.value)


def test_unknown_section():
    with pytest.raises(ConfigError) as info:
        parse_config("command: simulate\nbogus: 1\n")
    assert info.value.line == 2


def test_syntax_error_location():
    with pytest.raises(ConfigError) as info:
        parse_config("command: simulate\ndamping: [1, 2\n")
    assert info.value.line is not None and info.value.column is not None
    assert "syntax" in str(info.value)


@pytest.mark.parametrize("text, path", [
    ("stability_map:\n  b_ratio: {count: 1}\n", "stability_map.b_ratio"),
    ("simulate:\n  rel_tol: 0.5\n", "simulate.rel_tol"),
    ("simulate:\n  frame: sideways\n", "simulate.frame"),
    ("threads: 0\n", "threads"),
    ("preset: CVBIG\n", "preset"),
    ("kerr:\n  gamma_1_MHz: 0\n  gamma_2_MHz: 0\n", "kerr"),
    ("drive:\n  omega_m_MHz: 0\n", "drive"),
])
def test_invalid_values(text, path):
    with pytest.raises(ConfigError) as info:
        parse_config(text, command="simulate")
    assert info.value.path == path


def test_preset_override():
    cfg = parse_config("preset: YIG-297K\n", command="kerr-estimate", preset="YIG-4.2K")
    assert cfg.material().K_c2 / cfg.material().K_c1 == pytest.approx(4.8e-2)


def test_material_override():
    cfg = parse_config("material:\n  R_s_um: 250\n", command="kerr-estimate")
    assert cfg.material().R_s == pytest.approx(250e-6)


@pytest.mark.parametrize("command", COMMANDS)
def test_round_trip(command):
    cfg = parse_config(FIG2, command=command)
    again = parse_config(cfg.to_yaml())
    assert again.resolved() == cfg.resolved()


def test_resolved_covers_schema():
    res = parse_config("", command="verify").resolved()
    for name, keys in SCHEMA.items():
        assert set(res[name]) == set(keys)
    yaml.safe_load(parse_config("", command="verify").to_yaml())
