"""Wavefunction evaluation and raster properties.

Frozen point values come from a brute-force oracle: explicit Hermite
polynomials with factorial normalization at n <= 40, summed with mpmath at
50 digits.  The raster path never sees that code.
"""

import io
import math

import numpy as np
import pytest

from paircat.errors import GridTooSmallError
from paircat.fockspace import PairCatSpec, pair_cat, pair_coherent
from paircat.quadrature import (
    GridSpec,
    cat_wavefunction,
    default_grid,
    quadrature_distribution,
    raster_symmetry_errors,
    write_raster_csv,
    write_raster_matrix,
)

# 1/sqrt(pi) at 60 digits
PI_MINUS_HALF = 0.56418958354775628695

# psi(1.0, 0.5) for the even cat xi=1, q=2 (real; imaginary part vanishes)
PSI_CAT_1_2_0 = 0.23113883482641269181

# |psi|^2 probe values at (0,0), (1,1), (2,-1), (0.5,2.5) per parameter set
PROBE_POINTS = [(0.0, 0.0), (1.0, 1.0), (2.0, -1.0), (0.5, 2.5)]
PROBES = {
    (1.0, 0, "halfpi"): [
        0.2238241208493390809,
        0.11152776176473919984,
        0.01742648862847050691,
        0.0002165399972535601165,
    ],
    (1.0, 5, "halfpi"): [
        0.0,
        0.0094303721413673268664,
        0.0094970596257360552555,
        0.000020006496305084964926,
    ],
    (3.0, 2, "zero"): [
        0.21377126372917290086,
        0.017922583656180638271,
        0.073526853397193778844,
        0.00042532879307074105874,
    ],
}


class TestCatWavefunction:
    def test_vacuum_product_at_origin(self):
        st = pair_coherent(0.0, 0, 16)
        assert cat_wavefunction(st, 0.0, 0.0) == pytest.approx(
            PI_MINUS_HALF, rel=1e-14
        )

    def test_against_brute_force_oracle(self):
        st = pair_cat(PairCatSpec(xi=1.0, q=2, phi=0.0))
        val = cat_wavefunction(st, 1.0, 0.5)
        assert val.real == pytest.approx(PSI_CAT_1_2_0, rel=1e-12)
        assert abs(val.imag) < 1e-15

    def test_odd_cat_antisymmetry_per_axis(self):
        # odd-n selection flips the sign under reflection of either single
        # coordinate; flipping both squares the parity back out
        st = pair_cat(PairCatSpec(xi=1.0, q=0, phi=math.pi))
        for x in (0.3, 1.1, 2.4):
            a = cat_wavefunction(st, x, 0.7)
            assert cat_wavefunction(st, -x, 0.7) == pytest.approx(-a, rel=1e-12)
            assert cat_wavefunction(st, 0.7, -x) == pytest.approx(
                -cat_wavefunction(st, 0.7, x), rel=1e-12
            )
            assert cat_wavefunction(st, -x, -x) == pytest.approx(
                cat_wavefunction(st, x, x), rel=1e-12
            )

    @pytest.mark.parametrize("key", sorted(PROBES, key=str))
    def test_probe_values(self, key):
        xi, q, tag = key
        phi = math.pi / 2 if tag == "halfpi" else 0.0
        # tight tail so the truncated state is indistinguishable from the
        # infinite-series oracle at the comparison tolerance
        st = pair_cat(PairCatSpec(xi=xi, q=q, phi=phi, tail_epsilon=1e-22))
        for (x, y), expected in zip(PROBE_POINTS, PROBES[key]):
            got = abs(cat_wavefunction(st, x, y)) ** 2
            assert got == pytest.approx(expected, rel=1e-10, abs=1e-18)


class TestQuadratureDistribution:
    def test_vacuum_normalization(self):
        st = pair_coherent(0.0, 0, 16)
        raster = quadrature_distribution(st, GridSpec(-6, 6, -6, 6, 241, 241))
        assert raster.norm_estimate == pytest.approx(1.0, abs=1e-6)

    def test_raster_matches_pointwise_wavefunction(self):
        st = pair_cat(PairCatSpec(xi=1.0, q=1, phi=0.7))
        grid = GridSpec(-7, 7, -7, 7, 29, 29)
        raster = quadrature_distribution(st, grid)
        xs, ys = grid.x_nodes(), grid.y_nodes()
        for i in (0, 7, 14, 28):
            for j in (3, 14, 20):
                direct = abs(cat_wavefunction(st, xs[i], ys[j])) ** 2
                assert raster.values[i, j] == pytest.approx(
                    direct, rel=1e-12, abs=1e-30
                )

    def test_nonnegative_everywhere(self):
        st = pair_cat(PairCatSpec(xi=3.0, q=0, phi=math.pi / 2))
        raster = quadrature_distribution(st, default_grid())
        assert raster.values.min() >= 0.0
        assert 0.0 < raster.norm_estimate <= 1.05

    def test_swap_symmetry_q0(self):
        st = pair_cat(PairCatSpec(xi=1.0, q=0, phi=math.pi / 2))
        raster = quadrature_distribution(st, default_grid())
        assert raster_symmetry_errors(raster)["swap"] < 1e-12

    def test_point_symmetry_halfpi(self):
        st = pair_cat(PairCatSpec(xi=1.0, q=0, phi=math.pi / 2))
        raster = quadrature_distribution(st, default_grid())
        assert raster_symmetry_errors(raster)["point"] < 1e-12

    def test_axis_parity_phi0(self):
        st = pair_cat(PairCatSpec(xi=3.0, q=2, phi=0.0))
        raster = quadrature_distribution(st, default_grid())
        errs = raster_symmetry_errors(raster)
        assert errs["parity_x"] < 1e-12
        assert errs["parity_y"] < 1e-12

    def test_refinement_convergence_order(self):
        # the discretization error is only visible on coarse ladders; the
        # trapezoid rule converges spectrally once the structure is resolved
        st = pair_cat(PairCatSpec(xi=3.0, q=0, phi=math.pi / 2))
        gaps = []
        for n in (11, 21, 41, 81):
            raster = quadrature_distribution(st, GridSpec(-8, 8, -8, 8, n, n))
            gaps.append(abs(raster.norm_estimate - 1.0))
        # second-order (or better) shrinkage on each x2 refinement
        assert gaps[1] <= gaps[0] / 3.5
        assert gaps[2] <= gaps[1] / 3.5
        assert gaps[3] < 1e-10

    def test_clipped_grid_rejected(self):
        st = pair_cat(PairCatSpec(xi=7.0, q=2, phi=0.0))
        with pytest.raises(GridTooSmallError):
            quadrature_distribution(st, GridSpec(-4, 4, -4, 4, 50, 50))

    def test_thread_count_bit_identical(self):
        st = pair_cat(PairCatSpec(xi=3.0, q=2, phi=0.0))
        a = quadrature_distribution(st, default_grid(), threads=1)
        b = quadrature_distribution(st, default_grid(), threads=5)
        assert np.array_equal(a.values, b.values)
        assert a.norm_estimate == b.norm_estimate

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            GridSpec(1.0, -1.0, -1.0, 1.0, 10, 10)
        with pytest.raises(ValueError):
            GridSpec(-1.0, 1.0, -1.0, 1.0, 1, 10)


class TestRasterExport:
    def _raster(self):
        st = pair_coherent(0.0, 0, 16)
        return quadrature_distribution(st, GridSpec(-6, 6, -6, 6, 11, 11))

    def test_matrix_header_and_shape(self):
        buf = io.StringIO()
        write_raster_matrix(self._raster(), buf, "xi=0 q=0 phi=0")
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("# grid:")
        assert lines[1] == "# nodes: 11 x 11"
        assert lines[2].startswith("# norm_estimate:")
        assert lines[3] == "# state: xi=0 q=0 phi=0"
        assert len(lines) == 4 + 11
        assert all(len(row.split()) == 11 for row in lines[4:])

    def test_csv_long_form(self):
        buf = io.StringIO()
        write_raster_csv(self._raster(), buf, "xi=0 q=0 phi=0")
        lines = buf.getvalue().splitlines()
        assert lines[4] == "x,y,p"
        assert len(lines) == 5 + 11 * 11
        x, y, p = lines[5].split(",")
        assert float(x) == -6.0 and float(y) == -6.0
        assert float(p) >= 0.0
