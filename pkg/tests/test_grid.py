"""Grid transforms against a literal DFT-matrix oracle, plus serialization."""

import io
import struct

import numpy as np
import pytest

from fracleib import grid

from conftest import rel_l2_error


def dft_matrix_oracle(f):
    """h * sum_i f(x_i) exp(-2 pi i x_i xi_j), no FFT anywhere."""
    spec = f.spec
    x = spec.axis_points()
    xi = spec.axis_freqs()
    kernel = np.exp(-2j * np.pi * np.outer(xi, x)) * spec.h
    if spec.n == 1:
        return kernel @ f.values
    return kernel @ f.values @ kernel.T


class TestFourier:
    def test_matches_dft_matrix_1d(self):
        spec = grid.GridSpec(1, 64, 16.0)
        f = grid.make_test_function(spec, "random_bandlimited", seed=3, band=1.0)
        F = grid.fourier(f)
        want = dft_matrix_oracle(f)
        assert np.max(np.abs(F.values - want)) < 1e-12

    def test_matches_dft_matrix_2d(self):
        spec = grid.GridSpec(2, 16, 8.0)
        rng = np.random.default_rng(9)
        f = grid.space_function(spec, rng.standard_normal(spec.shape))
        F = grid.fourier(f)
        want = dft_matrix_oracle(f)
        assert np.max(np.abs(F.values - want)) < 1e-12

    def test_roundtrip(self, g1_fine):
        f = grid.make_test_function(g1_fine, "random_bandlimited", seed=0)
        back = grid.inverse_fourier(grid.fourier(f))
        assert rel_l2_error(back, f) < 1e-12

    def test_plancherel(self, g1_fine):
        f = grid.make_test_function(g1_fine, "random_bandlimited", seed=1)
        assert abs(grid.l2_norm(f) - grid.l2_norm(grid.fourier(f))) < 1e-10

    def test_gaussian_self_transform(self, g1_fine):
        # exp(-pi x^2) is its own transform; periodization error is
        # exp(-pi (L/2)^2) ~ 1e-350 at L=32, far below the assertion
        f = grid.make_test_function(g1_fine, "gaussian", width=1.0)
        F = grid.fourier(f)
        xi = g1_fine.axis_freqs()
        assert np.max(np.abs(F.values - np.exp(-np.pi * xi**2))) < 1e-12

    def test_constant_transforms_to_point_mass(self, g1):
        f = grid.space_function(g1, np.ones(g1.shape))
        F = grid.fourier(f)
        j0 = g1.N // 2  # xi = 0 bin
        assert abs(F.values[j0] - g1.L) < 1e-10
        off = np.abs(np.delete(F.values, j0))
        assert off.max() < 1e-10

    def test_translation_covariance(self, g1):
        f = grid.make_test_function(g1, "random_bandlimited", seed=5)
        a = 0.37  # not a grid multiple, exercises the spectral path
        lhs = grid.fourier(grid.shift(f, a)).values
        xi = g1.axis_freqs()
        rhs = np.exp(-2j * np.pi * a * xi) * grid.fourier(f).values
        rhs[0] = lhs[0]  # unpaired mode is pinned by both routes
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_shift_exact_roll_on_grid_multiple(self, g1):
        f = grid.make_test_function(g1, "random_bandlimited", seed=6)
        a = 4 * g1.h
        got = grid.shift(f, a)
        want = np.roll(f.values, 4)
        assert np.array_equal(got.values, want)

    def test_parseval_pairing(self, g1):
        # integral of f conj(g) equals the frequency-side pairing
        f = grid.make_test_function(g1, "random_bandlimited", seed=7)
        g = grid.make_test_function(g1, "random_bandlimited", seed=8)
        space = grid.integral(grid.pointwise_combine(lambda a, b: a * np.conj(b), f, g))
        fh = grid.fourier(f).values
        gh = grid.fourier(g).values
        freq = np.sum(fh * np.conj(gh)) / g1.L
        assert abs(space - freq) < 1e-10


class TestRefine:
    def test_refine_exact_on_bandlimited(self, g1):
        f = grid.make_test_function(g1, "random_bandlimited", seed=11)
        f2 = grid.refine(f, 2)
        assert f2.spec.N == 2 * g1.N
        # the refined samples on the coarse lattice reproduce the originals
        assert np.max(np.abs(f2.values[::2] - f.values)) < 1e-12

    def test_refine_preserves_l2(self, g1):
        f = grid.make_test_function(g1, "random_bandlimited", seed=12)
        assert abs(grid.l2_norm(grid.refine(f)) - grid.l2_norm(f)) < 1e-12


class TestTestFunctions:
    def test_bump_sum_separated_cross_terms(self, g1):
        f = grid.make_test_function(
            g1, "bump_sum", centers=[-8.0, 8.0], widths=[1.0, 1.0], amplitudes=[1.0, 2.0]
        )
        g_a = grid.make_test_function(g1, "gaussian", center=-8.0, width=1.0)
        g_b = grid.make_test_function(g1, "gaussian", center=8.0, width=1.0, amplitude=2.0)
        assert rel_l2_error(f, g_a + g_b) < 1e-12

    def test_width_cap(self, g1):
        with pytest.raises(ValueError):
            grid.make_test_function(g1, "gaussian", width=g1.L / 2)

    def test_unknown_kind(self, g1):
        with pytest.raises(ValueError):
            grid.make_test_function(g1, "sawtooth")

    def test_random_bandlimited_band_and_reality(self, g1):
        f = grid.make_test_function(g1, "random_bandlimited", seed=0, band=1.0, real=True)
        assert np.max(np.abs(f.values.imag)) < 1e-13
        F = grid.fourier(f)
        xi = g1.axis_freqs()
        assert np.max(np.abs(F.values[np.abs(xi) > 1.5])) < 1e-12
        assert abs(grid.l2_norm(f) - 1.0) < 1e-10

    def test_determinism(self, g1):
        a = grid.make_test_function(g1, "random_bandlimited", seed=42)
        b = grid.make_test_function(g1, "random_bandlimited", seed=42)
        assert np.array_equal(a.values, b.values)


class TestGridSpecValidation:
    def test_odd_n_rejected(self):
        with pytest.raises(ValueError):
            grid.GridSpec(1, 31, 8.0)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            grid.GridSpec(1, 4, 8.0)

    def test_dimension_rejected(self):
        with pytest.raises(ValueError):
            grid.GridSpec(3, 16, 8.0)

    def test_bad_box(self):
        with pytest.raises(ValueError):
            grid.GridSpec(1, 16, -1.0)

    def test_domain_mismatch_rejected(self, g1):
        f = grid.make_test_function(g1, "gaussian", width=1.0)
        F = grid.fourier(f)
        with pytest.raises(ValueError):
            _ = f + F


class TestSerialization:
    def test_header_layout(self, g1):
        f = grid.make_test_function(g1, "gaussian", width=1.0)
        buf = grid.to_bytes(f)
        n, N, L, dom = struct.unpack_from("<BIdB", buf)
        assert (n, N, L, dom) == (1, 256, 32.0, 0)
        payload = np.frombuffer(buf, dtype="<c16", offset=struct.calcsize("<BIdB"))
        assert np.array_equal(payload, f.values)

    def test_frequency_domain_tag(self, g1):
        F = grid.fourier(grid.make_test_function(g1, "gaussian", width=1.0))
        buf = grid.to_bytes(F)
        assert struct.unpack_from("<BIdB", buf)[3] == 1
        back = grid.from_bytes(buf)
        assert back.domain == F.domain
        assert np.array_equal(back.values, F.values)

    def test_roundtrip_2d(self, g2):
        rng = np.random.default_rng(0)
        f = grid.space_function(g2, rng.standard_normal(g2.shape) + 1j * rng.standard_normal(g2.shape))
        back = grid.from_bytes(grid.to_bytes(f))
        assert back.spec == g2
        assert np.array_equal(back.values, f.values)

    def test_save_load(self, g1, tmp_path):
        f = grid.make_test_function(g1, "random_bandlimited", seed=1)
        path = tmp_path / "f.bin"
        grid.save(f, path)
        back = grid.load(path)
        assert np.array_equal(back.values, f.values) and back.spec == f.spec

    def test_short_buffer_rejected(self, g1):
        f = grid.make_test_function(g1, "gaussian", width=1.0)
        buf = grid.to_bytes(f)
        with pytest.raises(ValueError):
            grid.from_bytes(buf[:-8])

    def test_bad_domain_code_rejected(self, g1):
        f = grid.make_test_function(g1, "gaussian", width=1.0)
        buf = bytearray(grid.to_bytes(f))
        buf[struct.calcsize("<BId")] = 7
        with pytest.raises(ValueError):
            grid.from_bytes(bytes(buf))

    def test_csv_roundtrip(self, g1, tmp_path):
        f = grid.make_test_function(g1, "random_bandlimited", seed=2)
        path = tmp_path / "f.csv"
        grid.to_csv(f, path)
        rows = path.read_text().strip().split("\n")
        assert rows[0].split(",") == ["x", "re", "im"]
        assert len(rows) == g1.N + 1
        re = np.array([float(r.split(",")[1]) for r in rows[1:]])
        im = np.array([float(r.split(",")[2]) for r in rows[1:]])
        assert np.array_equal(re + 1j * im, f.values)  # repr round-trips floats
