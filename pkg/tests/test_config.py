import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qswitch import config as cfg
from qswitch.channels import E_X, E_Z
from qswitch.linalg import InvalidInput


class TestParsing:
    @pytest.mark.parametrize(
        "text,value",
        [("0.5", 0.5), ("pi/4", math.pi / 4), ("3*pi/4", 3 * math.pi / 4), ("-pi", -math.pi), ("1e-3", 1e-3), (" 2 ", 2.0)],
    )
    def test_real(self, text, value):
        assert cfg.parse_real(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["", "abc", "__import__('os')", "1/0", "pi**2", "inf", "nan", "1e400"])
    def test_real_rejects(self, text):
        with pytest.raises(InvalidInput):
            cfg.parse_real(text)

    @given(st.floats(-1e6, 1e6))
    def test_real_roundtrip(self, x):
        assert cfg.parse_real(repr(x)) == x

    def test_complex(self):
        assert cfg.parse_complex("0.1+0.2j") == 0.1 + 0.2j
        assert cfg.parse_complex("0.3") == 0.3
        with pytest.raises(InvalidInput):
            cfg.parse_complex("x")

    def test_axis(self):
        assert cfg.parse_axis("z") == E_Z
        assert cfg.parse_axis("X") == E_X
        assert cfg.parse_axis("0, 0.6, 0.8") == (0.0, 0.6, 0.8)
        with pytest.raises(InvalidInput):
            cfg.parse_axis("1,0")

    def test_aliases(self):
        assert cfg.normalize_key("tp") == "T_p"
        assert cfg.normalize_key("pc") == "p_c"
        assert cfg.normalize_key("theta") == "xi"
        with pytest.raises(InvalidInput):
            cfg.normalize_key("temperature")


class TestFile:
    def test_read(self, tmp_path):
        f = tmp_path / "run.cfg"
        f.write_text("# comment\np = 0.9\n\ngamma=0.3  # trailing\nxi = pi/3\n")
        assert cfg.read_config_file(f) == {"p": "0.9", "gamma": "0.3", "xi": "pi/3"}

    def test_errors(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("p 0.9\n")
        with pytest.raises(InvalidInput):
            cfg.read_config_file(f)
        f.write_text("p = 0.9\np = 0.8\n")
        with pytest.raises(InvalidInput, match="duplicate"):
            cfg.read_config_file(f)
        with pytest.raises(InvalidInput):
            cfg.read_config_file(tmp_path / "missing.cfg")

    def test_flags_win(self, tmp_path):
        f = tmp_path / "run.cfg"
        f.write_text("p = 0.9\ngamma = 0.3\n")
        c = cfg.load(str(f), {"gamma": "0.6", "xi": None})
        assert c.p == 0.9 and c.gamma == 0.6 and c.xi == pytest.approx(math.pi / 4)

    def test_flag_temperature_displaces_file_p(self, tmp_path):
        f = tmp_path / "run.cfg"
        f.write_text("p = 0.9\n")
        assert cfg.load(str(f), {"T_p": "1"}).p == 0.5


class TestRunConfig:
    def test_defaults(self):
        c = cfg.RunConfig.from_mapping({})
        assert (c.p, c.gamma, c.rho00, c.p_c, c.axis) == (1.0, 0.5, 0.0, 0.5, E_Z)
        assert c.threads >= 1 and c.t_p == 0.0

    def test_temperature(self):
        assert cfg.RunConfig.from_mapping({"T_p": "0.5"}).p == 0.75

    def test_both_temperature_and_p(self):
        with pytest.raises(InvalidInput):
            cfg.RunConfig.from_mapping({"p": 0.9, "T_p": 0.2})

    @pytest.mark.parametrize(
        "values",
        [
            {"p": "1.2"},
            {"gamma": "-0.1"},
            {"rho00": "1.5"},
            {"p_c": "2"},
            {"tol": "0"},
            {"threads": "0"},
            {"threads": "two"},
            {"axis": "1,1,0"},
            {"rho00": "0.5", "rho01": "0.7"},
            {"T_p": "3"},
        ],
    )
    def test_invalid(self, values):
        with pytest.raises(InvalidInput):
            cfg.RunConfig.from_mapping(values)

    def test_objects(self):
        c = cfg.RunConfig.from_mapping({"rho00": "0.4", "rho01": "0.1-0.2j", "axis": "x"})
        assert c.probe.mat[0, 1] == 0.1 - 0.2j
        assert c.unitary.axis == E_X and c.noise.gamma == 0.5
