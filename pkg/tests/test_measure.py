import json
import math

import numpy as np
import pytest

from simplexflow.geometry import make_unit_simplex, unit_simplex_measure
from simplexflow.measure import DiscreteMeasure, collapse_clusters

from conftest import random_measure, random_rotation
from oracles import bfs_single_linkage


class TestConstruction:
    def test_uniform_default(self):
        mu = DiscreteMeasure([[0.0], [1.0], [2.0]])
        np.testing.assert_allclose(mu.weights, 1 / 3)

    def test_zero_weight_atoms_dropped(self):
        mu = DiscreteMeasure([[0.0], [1.0], [2.0]], [0.5, 0.0, 0.5])
        assert mu.natoms == 2
        np.testing.assert_allclose(mu.points[:, 0], [0.0, 2.0])

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError):
            DiscreteMeasure([[0.0], [1.0]], [1.5, -0.5])

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError):
            DiscreteMeasure([[0.0], [1.0]], [0.5, 0.6])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DiscreteMeasure(np.empty((0, 2)))

    def test_immutable(self):
        mu = DiscreteMeasure([[0.0], [1.0]])
        with pytest.raises(ValueError):
            mu.points[0, 0] = 5.0
        with pytest.raises(AttributeError):
            mu.points = np.zeros((1, 1))

    def test_1d_input_promoted(self):
        mu = DiscreteMeasure([0.0, 1.0, 2.0])
        assert mu.dim == 1
        assert mu.natoms == 3


class TestMoments:
    def test_barycenter_two_points(self):
        assert DiscreteMeasure([[0.0], [1.0]]).barycenter()[0] == pytest.approx(0.5)

    def test_barycenter_weighted(self):
        mu = DiscreteMeasure([[0.0], [1.0]], [0.25, 0.75])
        assert mu.barycenter()[0] == pytest.approx(0.75)

    def test_barycenter_centered_simplex(self):
        for n in (1, 2, 3, 5):
            mu = unit_simplex_measure(n)
            np.testing.assert_allclose(mu.barycenter(), 0.0, atol=1e-15)

    def test_variance_two_points(self):
        mu = DiscreteMeasure([[-0.5], [0.5]])
        assert mu.variance() == pytest.approx(0.25, abs=1e-15)

    def test_variance_unit_triangle(self):
        assert unit_simplex_measure(2).variance() == pytest.approx(1 / 3, abs=1e-12)

    def test_variance_single_point(self):
        assert DiscreteMeasure([[3.0, -2.0]]).variance() == pytest.approx(0.0, abs=1e-14)

    def test_variance_rigid_invariance(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 5))
            mu = random_measure(rng, n)
            rot = random_rotation(rng, n)
            shift = rng.standard_normal(n)
            moved = DiscreteMeasure(mu.points @ rot.T + shift, mu.weights)
            assert moved.variance() == pytest.approx(mu.variance(), abs=1e-10)

    def test_center(self):
        mu = DiscreteMeasure([[0.0], [1.0]]).center()
        np.testing.assert_allclose(mu.points[:, 0], [-0.5, 0.5])

    def test_center_weighted_example(self):
        mu = DiscreteMeasure([[3.0], [7.0]], [0.25, 0.75]).center()
        np.testing.assert_allclose(mu.points[:, 0], [-3.0, 1.0], atol=1e-14)
        assert abs(mu.barycenter()[0]) <= 1e-14

    def test_center_idempotent_and_variance_preserving(self, rng):
        for _ in range(10):
            mu = random_measure(rng, 3, scale=5.0)
            c = mu.center()
            assert np.linalg.norm(c.barycenter()) <= 1e-14
            assert c.variance() == pytest.approx(mu.variance(), rel=1e-12)
            np.testing.assert_allclose(c.center().points, c.points, atol=1e-14)

    def test_diameter(self):
        assert DiscreteMeasure([[0.0], [0.3], [1.2]]).diameter() == pytest.approx(1.2)
        assert DiscreteMeasure([[5.0, 5.0]]).diameter() == 0.0
        assert unit_simplex_measure(3).diameter() == pytest.approx(1.0, abs=1e-12)


class TestCollapse:
    def test_two_near_points(self):
        mu = DiscreteMeasure([[0.0], [1e-9]], [0.5, 0.5])
        out = collapse_clusters(mu, 1e-6)
        assert out.natoms == 1
        assert out.weights[0] == pytest.approx(1.0)
        assert out.points[0, 0] == pytest.approx(0.5e-9)

    def test_simplex_unchanged(self):
        mu = unit_simplex_measure(2)
        out = collapse_clusters(mu, 1e-6)
        np.testing.assert_allclose(out.points, mu.points)

    def test_rejects_negative_tol(self):
        with pytest.raises(ValueError):
            collapse_clusters(unit_simplex_measure(1), -1.0)

    def test_three_tight_clusters_vs_bfs_oracle(self, rng):
        centers = make_unit_simplex(2).vertices
        pts, wts = [], []
        for c in centers:
            for _ in range(10):
                pts.append(c + 1e-4 * rng.standard_normal(2))
                wts.append(rng.random() + 0.1)
        wts = np.array(wts)
        mu = DiscreteMeasure(np.array(pts), wts / wts.sum())
        out = collapse_clusters(mu, 0.01)
        clusters = bfs_single_linkage(mu.points, 0.01)
        assert out.natoms == len(clusters) == 3
        for atom_idx, members in enumerate(clusters):
            mass = math.fsum(float(mu.weights[i]) for i in members)
            bary = (mu.weights[members] @ mu.points[members]) / mass
            assert out.weights[atom_idx] == pytest.approx(mass, abs=1e-15)
            np.testing.assert_allclose(out.points[atom_idx], bary, atol=1e-12)

    def test_mass_conservation_and_diameter_shrink(self, rng):
        for tol in (0.0, 0.05, 0.5, 10.0):
            mu = random_measure(rng, 2, max_atoms=12)
            out = collapse_clusters(mu, tol)
            assert math.fsum(out.weights.tolist()) == pytest.approx(1.0, abs=1e-12)
            assert out.diameter() <= mu.diameter() + 1e-12


class TestJSON:
    def test_round_trip_bit_exact(self, rng):
        for _ in range(10):
            mu = random_measure(rng, int(rng.integers(1, 4)))
            back = DiscreteMeasure.from_json(mu.to_json())
            assert back.points.tobytes() == mu.points.tobytes()
            assert back.weights.tobytes() == mu.weights.tobytes()

    def test_schema(self):
        data = json.loads(DiscreteMeasure([[0.0, 1.0]]).to_json())
        assert set(data) == {"dim", "points", "weights"}
        assert data["dim"] == 2

    def test_weights_optional(self):
        mu = DiscreteMeasure.from_dict({"dim": 1, "points": [[0.0], [1.0]]})
        np.testing.assert_allclose(mu.weights, 0.5)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            DiscreteMeasure.from_dict({"dim": 3, "points": [[0.0, 1.0]]})


class TestIsodiametricInvariant:
    def test_unit_diameter_variance_bound(self, rng):
        # any measure with diameter <= 1 has variance <= n/(2n+2)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            mu = random_measure(rng, n, max_atoms=10)
            d = mu.diameter()
            if d == 0.0:
                continue
            scaled = DiscreteMeasure(mu.points / d, mu.weights)
            assert scaled.variance() <= n / (2 * n + 2) + 1e-9
