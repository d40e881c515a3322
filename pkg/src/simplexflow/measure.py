"""Discrete probability measures: weighted point clouds with moment statistics."""

import json
import math

import numpy as np

WEIGHT_SUM_TOL = 1e-12


class DiscreteMeasure:
    """Immutable weighted point cloud in R^n with total mass 1.

    Zero-weight atoms are dropped on construction (support semantics);
    negative weights are rejected, and the remaining weights must sum to 1
    within 1e-12.  Omitting ``weights`` gives the uniform measure.
    """

    __slots__ = ("points", "weights")

    def __init__(self, points, weights=None):
        pts = np.array(points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValueError(f"points must be a nonempty (N, n) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        n_atoms = pts.shape[0]
        if weights is None:
            wts = np.full(n_atoms, 1.0 / n_atoms)
        else:
            wts = np.array(weights, dtype=float, copy=True).reshape(-1)
            if wts.shape[0] != n_atoms:
                raise ValueError(f"{n_atoms} points but {wts.shape[0]} weights")
            if np.any(wts < 0.0) or not np.all(np.isfinite(wts)):
                raise ValueError("weights must be finite and nonnegative")
            keep = wts > 0.0
            if not np.any(keep):
                raise ValueError("measure has no positive-weight atoms")
            pts, wts = pts[keep], wts[keep]
        total = math.fsum(wts.tolist())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total!r}")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteMeasure is immutable")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def natoms(self) -> int:
        return self.points.shape[0]

    def __repr__(self):
        return f"DiscreteMeasure(natoms={self.natoms}, dim={self.dim})"

    def barycenter(self) -> np.ndarray:
        """Mass-weighted mean position."""
        return self.weights @ self.points

    def variance(self) -> float:
        """Second moment about the barycenter: sum m_i |x_i|^2 - |mean|^2."""
        second = float(self.weights @ np.einsum("ij,ij->i", self.points, self.points))
        bary = self.barycenter()
        return second - float(bary @ bary)

    def center(self) -> "DiscreteMeasure":
        """Translate so the barycenter vanishes (residual below 1e-14)."""
        pts = self.points - self.barycenter()
        # second pass kills the O(|bary| * weight-sum-error) residual
        pts = pts - self.weights @ pts
        return DiscreteMeasure(pts, self.weights)

    def diameter(self) -> float:
        """Largest pairwise separation of the support (0 for a single atom)."""
        if self.natoms == 1:
            return 0.0
        diff = self.points[:, None, :] - self.points[None, :, :]
        return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))

    def to_dict(self) -> dict:
        return {
            "dim": int(self.dim),
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteMeasure":
        pts = np.asarray(data["points"], dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if "dim" in data and pts.shape[1] != int(data["dim"]):
            raise ValueError(f"declared dim {data['dim']} != point dim {pts.shape[1]}")
        return cls(pts, data.get("weights"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(text))


def collapse_clusters(mu: DiscreteMeasure, tol: float) -> DiscreteMeasure:
    """Merge atoms by single-linkage clustering at distance ``tol``.

    Each cluster becomes one atom at its local (mass-weighted) barycenter
    carrying the cluster's total mass.  Clusters are ordered by their
    smallest member index, which makes the output deterministic.
    """
    if tol < 0.0:
        raise ValueError(f"cluster tolerance must be nonnegative, got {tol}")
    n = mu.natoms
    if n == 1:
        return mu
    diff = mu.points[:, None, :] - mu.points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)

    new_pts, new_wts = [], []
    for root in sorted(members):
        idx = members[root]
        mass = math.fsum(float(mu.weights[i]) for i in idx)
        bary = (mu.weights[idx] @ mu.points[idx]) / mass
        new_pts.append(bary)
        new_wts.append(mass)
    return DiscreteMeasure(np.asarray(new_pts), np.asarray(new_wts))
