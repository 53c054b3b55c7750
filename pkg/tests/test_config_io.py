import struct

import numpy as np
import pytest

from anisolab import (ConfigError, ScalarField, StudyConfig, forcing_field,
                      load_config, load_field, make_grid, save_field)

from conftest import random_field


class TestFieldIO:
    def test_round_trip_bitwise(self, tmp_path, unit_square, rng):
        u = random_field(unit_square(8), rng)
        path = tmp_path / "u.field"
        save_field(path, u)
        v = load_field(path)
        assert v.grid == u.grid
        assert np.array_equal(v.values, u.values)

    def test_round_trip_3d(self, tmp_path, rng):
        g = make_grid([(0.0, 2.0), (-1.0, 1.0), (0.0, 1.0)], (4, 6, 8),
                      q=2)
        u = ScalarField(g, rng.standard_normal(g.node_shape))
        path = tmp_path / "u3.field"
        save_field(path, u)
        v = load_field(path)
        assert v.grid == g
        assert np.array_equal(v.values, u.values)

    def test_header_layout_documented(self, tmp_path, unit_square):
        # magic, uint32 ndim, uint32 q, ndim uint64 cells, ndim f64 lo,
        # ndim f64 hi, little endian, then the C-order f64 node payload
        g = unit_square(4)
        u = ScalarField.from_function(g, lambda x, y: x + 2 * y)
        path = tmp_path / "u.field"
        save_field(path, u)
        raw = path.read_bytes()
        assert raw[:8] == b"AFLD0001"
        ndim, q = struct.unpack_from("<II", raw, 8)
        assert (ndim, q) == (2, 1)
        cells = struct.unpack_from("<2Q", raw, 16)
        assert cells == (4, 4)
        lo = struct.unpack_from("<2d", raw, 32)
        hi = struct.unpack_from("<2d", raw, 48)
        assert lo == (0.0, 0.0) and hi == (1.0, 1.0)
        payload = np.frombuffer(raw, dtype="<f8", offset=64)
        assert np.array_equal(payload.reshape(5, 5), u.values)
        assert len(raw) == 64 + 25 * 8

    def test_bad_magic_rejected(self, tmp_path, unit_square, rng):
        u = random_field(unit_square(4), rng)
        path = tmp_path / "u.field"
        save_field(path, u)
        raw = bytearray(path.read_bytes())
        raw[:8] = b"AFLD9999"
        path.write_bytes(bytes(raw))
        with pytest.raises(ConfigError):
            load_field(path)

    def test_truncated_payload_rejected(self, tmp_path, unit_square, rng):
        u = random_field(unit_square(4), rng)
        path = tmp_path / "u.field"
        save_field(path, u)
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(ConfigError):
            load_field(path)

    def test_save_leaves_no_temp_files(self, tmp_path, unit_square, rng):
        u = random_field(unit_square(4), rng)
        save_field(tmp_path / "u.field", u)
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == ["u.field"]


class TestForcing:
    def test_constant(self, unit_square):
        f = forcing_field("constant", unit_square(4), value=2.5)
        assert np.all(f.values == 2.5)

    def test_sine_product_unit_square(self, unit_square):
        g = unit_square(8)
        f = forcing_field("sine_product", g)
        x, y = g.meshgrid()
        assert np.allclose(f.values, np.sin(np.pi * x) * np.sin(np.pi * y),
                           atol=1e-14)

    def test_sine_product_rescales_to_extent(self):
        g = make_grid([(0.0, 2.0), (1.0, 3.0)], (8, 8), q=1)
        f = forcing_field("sine_product", g, modes=[2, 1])
        x, y = g.meshgrid()
        expect = np.sin(2 * np.pi * x / 2) * np.sin(np.pi * (y - 1) / 2)
        assert np.allclose(f.values, expect, atol=1e-14)

    def test_sine_x2_ignores_scaled_axes(self, unit_square):
        g = unit_square(8)
        f = forcing_field("sine_x2", g)
        y = g.meshgrid()[1]
        assert np.allclose(f.values, np.sin(np.pi * y), atol=1e-14)
        assert np.abs(f.values[0]).max() > 0.9  # alive on the x1 face

    def test_bad_inputs(self, unit_square):
        g = unit_square(4)
        with pytest.raises(ConfigError):
            forcing_field("noise", g)
        with pytest.raises(ConfigError):
            forcing_field("sine_product", g, modes=[1, 2, 3])


class TestStudyConfig:
    def test_defaults_validate(self):
        cfg = StudyConfig()
        assert cfg.epsilons[0] == 1.0
        assert cfg.out_format == "csv"

    def test_dict_round_trip(self):
        cfg = StudyConfig(cells=[32, 32], epsilons=[1.0, 0.5],
                          nonlinearity="tanh", seed=7)
        again = StudyConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            StudyConfig.from_dict({"cells": [8, 8], "mesh": "fine"})

    @pytest.mark.parametrize("kwargs", [
        {"lo": [0.0], "hi": [1.0, 1.0], "cells": [8, 8]},
        {"epsilons": []},
        {"epsilons": [0.5, 1.0]},
        {"epsilons": [1.5, 0.5]},
        {"epsilons": [1.0, 1.0]},
        {"fourier_epsilons": [2.0]},
        {"margin": 0},
        {"nested": 0},
        {"workers": 0},
        {"solver_method": "multigrid"},
        {"out_format": "xml"},
        {"seed": -1},
        {"seed": 2 ** 64},
        {"damping": 0.0},
        {"translation_levels": 0},
        {"fourier_lattice": 1},
    ])
    def test_validation_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            StudyConfig(**kwargs)

    def test_builders_consistent(self):
        cfg = StudyConfig(cells=[16, 16], coefficient_family="variable",
                          forcing_family="sine_product", nested=3)
        g = cfg.build_grid()
        assert g.cells == (16, 16) and g.q == 1
        coeffs = cfg.build_coefficients(g)
        assert coeffs.name == "variable"
        f = cfg.build_forcing(g)
        assert f.grid == g
        assert cfg.effective_margin(g) == 2  # 16 // 8
        mask = cfg.build_mask(g)
        assert mask.margins == (2, 2)
        fam = cfg.build_family(g)
        assert len(fam) == 3
        assert cfg.build_nonlinearity() is None

    def test_effective_margin_floor_and_override(self):
        cfg = StudyConfig(cells=[4, 4])
        assert cfg.effective_margin(cfg.build_grid()) == 1
        cfg = StudyConfig(cells=[128, 64])
        assert cfg.effective_margin(cfg.build_grid()) == 8
        cfg = StudyConfig(cells=[128, 64], margin=5)
        assert cfg.effective_margin(cfg.build_grid()) == 5


INI_TEXT = """
[grid]
lo = 0.0, 0.0
hi = 1.0, 1.0
cells = 32, 32
q = 1

[coefficients]
family = constant
matrix = 2.0 0.5 ; 0.5 1.0   # rows split on ;
lam = 0.7928932188134524

[forcing]
family = sine_product
modes = 1, 1

[sweep]
epsilons = 1.0 0.5 0.25
margin = 4
nested = 5
workers = 2

[solver]
method = cg
tol = 1e-9

[nonlinearity]
family = linear
kappa = 1.0
damping = 0.8
max_iter = 120

[fourier]
lattice = 32
samples = 5
epsilons = 1.0 0.1

[translation]
levels = 2

[output]
dir = results
format = json

[random]
seed = 42
"""


class TestConfigFile:
    def test_full_file_parses(self, tmp_path):
        path = tmp_path / "study.cfg"
        path.write_text(INI_TEXT)
        cfg = load_config(path)
        assert cfg.cells == [32, 32]
        assert cfg.coefficient_family == "constant"
        assert cfg.coefficient_params["matrix"] == [[2.0, 0.5], [0.5, 1.0]]
        assert cfg.coefficient_params["lam"] == pytest.approx(
            1.5 - np.sqrt(0.5))
        assert cfg.forcing_params["modes"] == [1, 1]
        assert cfg.epsilons == [1.0, 0.5, 0.25]
        assert cfg.margin == 4 and cfg.nested == 5 and cfg.workers == 2
        assert cfg.solver_method == "cg" and cfg.solver_tol == 1e-9
        assert cfg.nonlinearity == "linear"
        assert cfg.nonlinearity_params == {"kappa": 1.0}
        assert cfg.damping == 0.8 and cfg.picard_max_iter == 120
        assert cfg.fourier_lattice == 32 and cfg.fourier_samples == 5
        assert cfg.fourier_epsilons == [1.0, 0.1]
        assert cfg.translation_levels == 2
        assert cfg.out_dir == "results" and cfg.out_format == "json"
        assert cfg.seed == 42

    def test_minimal_file_keeps_defaults(self, tmp_path):
        path = tmp_path / "min.cfg"
        path.write_text("[grid]\ncells = 16, 16\n")
        cfg = load_config(path)
        assert cfg.cells == [16, 16]
        assert cfg.epsilons == [1.0, 0.5, 0.25, 0.125]
        assert cfg.solver_method == "direct"

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("[grid]\ncells = 8, 8\n[magic]\nwand = 1\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unparseable_file_rejected(self, tmp_path):
        path = tmp_path / "broken.cfg"
        path.write_text("cells = 8, 8\n")  # key before any section
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "absent.cfg")

    def test_invalid_values_surface_as_config_errors(self, tmp_path):
        path = tmp_path / "bad_eps.cfg"
        path.write_text("[sweep]\nepsilons = 0.5 1.0\n")
        with pytest.raises(ConfigError):
            load_config(path)
