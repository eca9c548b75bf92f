import math

import numpy as np
import pytest

from uavpath import (
    DemParseError,
    NodataError,
    OutOfBoundsError,
    SyntheticTerrainSpec,
    TerrainMap,
    generate_synthetic,
    height_at,
    load_dem,
    save_dem,
)

SMALL_DEM = """\
ncols 2
nrows 2
xllcorner 0.0
yllcorner 0.0
cellsize 10.0
1 2
3 4
"""


def write(tmp_path, text, name="grid.asc"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadDem:
    def test_two_by_two(self, tmp_path):
        t = load_dem(write(tmp_path, SMALL_DEM))
        assert (t.n_cols, t.n_rows) == (2, 2)
        assert (t.origin_x, t.origin_y, t.cell_size) == (0.0, 0.0, 10.0)
        assert t.elevations.size == 4
        # first file row is the northernmost: value 1 sits at max y
        assert height_at(t, 0.0, 10.0) == 1.0
        assert height_at(t, 0.0, 0.0) == 3.0

    def test_row_width_mismatch(self, tmp_path):
        bad = "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 2\n3 4 5\n"
        with pytest.raises(DemParseError, match="row 1: expected 3 values"):
            load_dem(write(tmp_path, bad))

    def test_nodata_cell_flagged(self, tmp_path):
        text = (
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n"
            "NODATA_value -9999\n1 2\n-9999 4\n"
        )
        t = load_dem(write(tmp_path, text))
        assert t.nodata_value == -9999
        assert np.isnan(t.elevations[0, 0])  # south-west corner
        assert np.isfinite(t.elevations).sum() == 3

    def test_missing_header_key(self, tmp_path):
        bad = "ncols 2\nnrows 2\nxllcorner 0\ncellsize 5\n1 2\n3 4\n"
        with pytest.raises(DemParseError, match="missing header key 'yllcorner'"):
            load_dem(write(tmp_path, bad))

    def test_duplicate_header_key(self, tmp_path):
        bad = "ncols 2\nncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 2\n3 4\n"
        with pytest.raises(DemParseError, match="duplicate header key"):
            load_dem(write(tmp_path, bad))

    def test_non_numeric_cell(self, tmp_path):
        bad = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 x\n3 4\n"
        with pytest.raises(DemParseError, match="line 6"):
            load_dem(write(tmp_path, bad))

    def test_header_case_insensitive(self, tmp_path):
        text = "NCOLS 2\nNROWS 2\nXLLCORNER 1\nYLLCORNER 2\nCELLSIZE 5\n1 2\n3 4\n"
        t = load_dem(write(tmp_path, text))
        assert (t.origin_x, t.origin_y) == (1.0, 2.0)

    def test_row_count_mismatch(self, tmp_path):
        bad = "ncols 2\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 5\n1 2\n3 4\n"
        with pytest.raises(DemParseError, match="expected 3 data rows"):
            load_dem(write(tmp_path, bad))


class TestHeightAt:
    def test_grid_node_identity(self, tmp_path):
        t = load_dem(write(tmp_path, SMALL_DEM))
        for (x, y), want in [((0, 0), 3.0), ((10, 0), 4.0), ((0, 10), 1.0), ((10, 10), 2.0)]:
            assert height_at(t, x, y) == want

    def test_cell_center_symmetry(self):
        t = TerrainMap(2, 2, 0.0, 0.0, 10.0, -9999.0, [[0.0, 10.0], [10.0, 0.0]])
        assert height_at(t, 5.0, 5.0) == pytest.approx(5.0)

    def test_hand_evaluated_bilinear(self):
        # f(0,0)=1, f(1,0)=2, f(0,1)=3, f(1,1)=4 queried at (0.25, 0.75):
        # (1-u)(1-v)f00 + u(1-v)f10 + (1-u)v f01 + uv f11 = 2.75
        t = TerrainMap(2, 2, 0.0, 0.0, 1.0, -9999.0, [[1.0, 2.0], [3.0, 4.0]])
        assert height_at(t, 0.25, 0.75) == pytest.approx(2.75, abs=1e-12)

    def test_out_of_bounds(self, tmp_path):
        t = load_dem(write(tmp_path, SMALL_DEM))
        with pytest.raises(OutOfBoundsError):
            height_at(t, -0.1, 5.0)
        with pytest.raises(OutOfBoundsError):
            height_at(t, 5.0, 10.1)

    def test_nodata_corner(self, tmp_path):
        text = (
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n"
            "NODATA_value -9999\n1 2\n-9999 4\n"
        )
        t = load_dem(write(tmp_path, text))
        with pytest.raises(NodataError):
            height_at(t, 5.0, 5.0)

    def test_all_nodes_exact(self):
        rng = np.random.default_rng(3)
        grid = rng.uniform(-50, 150, size=(7, 9))
        t = TerrainMap(9, 7, 5.0, -20.0, 2.5, -9999.0, grid)
        for iy in range(7):
            for ix in range(9):
                assert height_at(t, 5.0 + 2.5 * ix, -20.0 + 2.5 * iy) == grid[iy, ix]

    def test_continuity_within_cells(self):
        rng = np.random.default_rng(4)
        grid = rng.uniform(0, 100, size=(6, 6))
        t = TerrainMap(6, 6, 0.0, 0.0, 10.0, -9999.0, grid)
        max_grad = np.abs(np.diff(grid)).max() / t.cell_size + np.abs(np.diff(grid, axis=0)).max() / t.cell_size
        for _ in range(300):
            x, y = rng.uniform(0, 50, 2)
            eps = 10 ** rng.uniform(-6, -1)
            dx, dy = rng.normal(size=2)
            scale = eps / math.hypot(dx, dy)
            x2 = float(np.clip(x + dx * scale, 0, 50))
            y2 = float(np.clip(y + dy * scale, 0, 50))
            dh = abs(height_at(t, x2, y2) - height_at(t, x, y))
            dist = math.hypot(x2 - x, y2 - y)
            assert dh <= dist * 2 * max_grad + 1e-9


class TestSynthetic:
    def test_zero_hills_constant(self):
        spec = SyntheticTerrainSpec(n_cols=5, n_rows=4, cell_size=2.0, base_elevation=100.0)
        t = generate_synthetic(spec, 1)
        assert np.all(t.elevations == 100.0)

    def test_single_hill_peak_on_node(self):
        spec = SyntheticTerrainSpec(
            n_cols=15, n_rows=15, cell_size=10.0, base_elevation=10.0,
            n_hills=1, amp_min=50.0, amp_max=50.0, sigma_min=20.0, sigma_max=20.0,
        )
        t = generate_synthetic(spec, 5)
        assert t.elevations.max() == pytest.approx(60.0)

    def test_deterministic(self):
        spec = SyntheticTerrainSpec(
            n_cols=12, n_rows=9, cell_size=5.0, n_hills=4,
            amp_min=5.0, amp_max=20.0, sigma_min=10.0, sigma_max=40.0,
        )
        a = generate_synthetic(spec, 42)
        b = generate_synthetic(spec, 42)
        assert np.array_equal(a.elevations, b.elevations)

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            SyntheticTerrainSpec(n_cols=1, n_rows=5, cell_size=1.0)
        with pytest.raises(ValueError):
            SyntheticTerrainSpec(n_cols=5, n_rows=5, cell_size=0.0)
        with pytest.raises(ValueError):
            SyntheticTerrainSpec(n_cols=5, n_rows=5, cell_size=1.0, n_hills=1, sigma_min=0.0)


class TestSaveRoundTrip:
    def test_values_round_trip_exactly(self, tmp_path):
        rng = np.random.default_rng(9)
        grid = rng.uniform(-10, 500, size=(5, 8))
        grid[2, 3] = np.nan
        t = TerrainMap(8, 5, 1.25, -3.5, 0.75, -9999.0, grid)
        out = tmp_path / "rt.asc"
        save_dem(t, out)
        t2 = load_dem(out)
        assert (t2.n_cols, t2.n_rows) == (8, 5)
        assert (t2.origin_x, t2.origin_y, t2.cell_size) == (1.25, -3.5, 0.75)
        both = np.isfinite(t.elevations)
        assert np.array_equal(np.isnan(t2.elevations), ~both)
        assert np.array_equal(t2.elevations[both], t.elevations[both])
