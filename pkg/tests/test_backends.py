"""Compiled core vs NumPy reference: identical contracts, 1e-12 agreement,
and bitwise thread-count independence within each backend."""

import math

import numpy as np
import pytest

from simplexflow import _backend, _reference
from simplexflow.kernel import HARD_CUTOFF_TOL

compiled = pytest.importorskip("simplexflow._core", reason="compiled kernels not built")


def random_inputs(rng, n_atoms=37, dim=3):
    pts = np.ascontiguousarray(rng.standard_normal((n_atoms, dim)))
    w = rng.random(n_atoms) + 0.05
    return pts, np.ascontiguousarray(w / w.sum())


BACKENDS = [("compiled", compiled), ("python", _reference)]


class TestBackendAgreement:
    @pytest.mark.parametrize("hard", [False, True])
    def test_row_energies(self, rng, hard):
        pts, wts = random_inputs(rng)
        pts *= 0.2  # keep the hard case finite
        outs = []
        for _name, impl in BACKENDS:
            out = np.empty(len(wts))
            impl.row_energies(pts, wts, 7.0, 2.5, hard, out, 0, len(wts))
            outs.append(out)
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=1e-15)

    def test_row_energies_hard_blowup(self, rng):
        pts, wts = random_inputs(rng)
        pts *= 10.0
        for _name, impl in BACKENDS:
            out = np.empty(len(wts))
            impl.row_energies(pts, wts, 0.0, 2.0, True, out, 0, len(wts))
            assert math.isinf(out[0])

    def test_field_gradient(self, rng):
        pts, wts = random_inputs(rng)
        outs = []
        for _name, impl in BACKENDS:
            out = np.empty_like(pts)
            impl.field_gradient_rows(pts, wts, 6.0, 2.0, out, 0, len(wts))
            outs.append(out)
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=1e-14)

    def test_potential(self, rng):
        pts, wts = random_inputs(rng)
        targets = np.ascontiguousarray(rng.standard_normal((11, 3)))
        outs = []
        for _name, impl in BACKENDS:
            out = np.empty(11)
            impl.potential_rows(pts, wts, 5.0, 2.0, False, targets, out, 0, 11)
            outs.append(out)
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=1e-15)

    def test_gram(self, rng):
        pts, wts = random_inputs(rng, n_atoms=12)
        outs = []
        for _name, impl in BACKENDS:
            out = np.empty((12, 12))
            impl.gram_rows(pts, 5.0, 2.0, False, out, 0, 12)
            outs.append(out)
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=1e-15)
        assert np.all(np.diag(outs[0]) == 0.0)

    def test_power_moment(self, rng):
        pts, wts = random_inputs(rng)
        outs = []
        for _name, impl in BACKENDS:
            out = np.empty(len(wts))
            impl.power_moment_rows(pts, wts, 2.0, out, 0, len(wts))
            outs.append(out)
        np.testing.assert_allclose(outs[0], outs[1], rtol=1e-12, atol=1e-16)

    def test_zero_distance_pairs_finite(self):
        pts = np.zeros((3, 2))
        wts = np.full(3, 1 / 3)
        for _name, impl in BACKENDS:
            out = np.empty(3)
            impl.row_energies(pts, wts, 4.0, 2.0, False, out, 0, 3)
            np.testing.assert_allclose(out, 0.0)
            grad = np.empty((3, 2))
            impl.field_gradient_rows(pts, wts, 4.0, 2.0, grad, 0, 3)
            np.testing.assert_allclose(grad, 0.0)

    def test_hard_cutoff_tolerance(self):
        # separations inside the documented slack stay confined
        pts = np.array([[0.0], [1.0 + 0.5 * HARD_CUTOFF_TOL]])
        wts = np.array([0.5, 0.5])
        for _name, impl in BACKENDS:
            out = np.empty(2)
            impl.row_energies(pts, wts, 0.0, 2.0, True, out, 0, 2)
            assert math.isfinite(out[0])


class TestThreadBitwiseStability:
    def test_energy_bitwise_across_thread_counts(self, rng):
        pts, wts = random_inputs(rng, n_atoms=101)
        values = {
            k: _backend.pair_energy(pts, wts, 8.0, 2.0, False, threads=k)
            for k in (1, 2, 3, 7)
        }
        assert len({v.hex() for v in values.values()}) == 1

    def test_gradient_bitwise_across_thread_counts(self, rng):
        pts, wts = random_inputs(rng, n_atoms=64)
        grads = [
            _backend.field_gradient(pts, wts, 8.0, 2.0, threads=k).tobytes()
            for k in (1, 2, 5)
        ]
        assert len(set(grads)) == 1


class TestBackendSelection:
    def test_reports_compiled(self):
        assert _backend.backend_name() in ("compiled", "python")
        assert _backend.have_compiled()

    def test_thread_setting_roundtrip(self):
        _backend.set_num_threads(3)
        assert _backend.get_num_threads() == 3
        _backend.set_num_threads(1)
        with pytest.raises(ValueError):
            _backend.set_num_threads(0)
