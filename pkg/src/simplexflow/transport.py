"""Exact Kantorovich-Rubinstein-Wasserstein distances between discrete measures.

d_p for p in {1, 2} is the optimum of the transportation LP with cost
|x - y|**p, solved to a vertex by the HiGHS simplex solver.  d_inf is the
bottleneck distance: the smallest pairwise distance t for which a coupling
supported on pairs within t exists.  Feasibility at each t is decided by
max-flow run on exact integers (binary floats are dyadic rationals, so the
weights scale to integers exactly); only the final comparison against the
mass-conservation tolerance involves the scale.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .measure import DiscreteMeasure

MAX_ATOMS = 10_000
MARGINAL_TOL = 1e-10
FLOW_CONSERVATION_TOL = 1e-12


@dataclass
class CouplingPlan:
    """Transport plan gamma between the atoms of mu (rows) and nu (cols)."""

    rows: np.ndarray  # mu atom positions
    cols: np.ndarray  # nu atom positions
    flow: np.ndarray  # (natoms_mu, natoms_nu), nonnegative

    def __post_init__(self):
        f = np.asarray(self.flow, dtype=float)
        if np.any(f < -1e-12):
            raise ValueError("coupling has negative flow")
        object.__setattr__(self, "flow", np.maximum(f, 0.0))

    def check_marginals(self, mu: DiscreteMeasure, nu: DiscreteMeasure, tol=MARGINAL_TOL):
        row_err = float(np.abs(self.flow.sum(axis=1) - mu.weights).max())
        col_err = float(np.abs(self.flow.sum(axis=0) - nu.weights).max())
        if max(row_err, col_err) > tol:
            raise ValueError(f"marginal mismatch: rows {row_err:g}, cols {col_err:g}")

    def to_dict(self) -> dict:
        i_idx, j_idx = np.nonzero(self.flow)
        return {
            "shape": [int(self.flow.shape[0]), int(self.flow.shape[1])],
            "triplets": [
                [int(i), int(j), float(self.flow[i, j])] for i, j in zip(i_idx, j_idx)
            ],
        }


def _pair_costs(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    if mu.dim != nu.dim:
        raise ValueError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    if mu.natoms > MAX_ATOMS or nu.natoms > MAX_ATOMS:
        raise ValueError(f"atom counts above {MAX_ATOMS} are unsupported")
    diff = mu.points[:, None, :] - nu.points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _repair_vertex_flow(flow, row_w, col_w):
    """Re-solve the flows on the support of an LP vertex solution.

    A basic solution is supported on a forest; leaf elimination on that
    forest reproduces the flows directly from the marginals, removing the
    solver's feasibility slack.  Falls back to the input when the support
    is not a forest (degenerate ties).
    """
    m, k = flow.shape
    support = flow > 1e-11
    edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(support))]
    parent = list(range(m + k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        ri, rj = find(i), find(m + j)
        if ri == rj:
            return flow  # cycle: keep the solver's plan
        parent[ri] = rj

    balance = np.concatenate([row_w, -col_w])
    adj: dict[int, list[tuple[int, int]]] = {u: [] for u in range(m + k)}
    for e_idx, (i, j) in enumerate(edges):
        adj[i].append((m + j, e_idx))
        adj[m + j].append((i, e_idx))
    degree = [len(adj[u]) for u in range(m + k)]
    removed = [False] * len(edges)
    new_flow = np.zeros_like(flow)
    bal = balance.copy()
    stack = [u for u in range(m + k) if degree[u] == 1]
    while stack:
        u = stack.pop()
        live = [(v, e) for v, e in adj[u] if not removed[e]]
        if not live:
            continue
        v, e_idx = live[0]
        i, j = edges[e_idx]
        f = bal[u] if u == i else -bal[u]
        if f < -1e-9:
            return flow
        new_flow[i, j] = max(f, 0.0)
        bal[v] += bal[u]
        bal[u] = 0.0
        removed[e_idx] = True
        degree[u] -= 1
        degree[v] -= 1
        if degree[v] == 1:
            stack.append(v)
    return new_flow


def _round_to_polytope(flow, row_w, col_w):
    """Push a nearly feasible plan onto the transportation polytope.

    Rescales each row to its exact marginal, then repairs the column sums
    by moving the residual mass within rows (row sums stay put).  The total
    mass moved is the size of the feasibility slack, so the cost changes
    by at most slack * max pair cost.
    """
    out = np.array(flow, copy=True)
    m, k = out.shape
    row_sum = out.sum(axis=1)
    for i in range(m):
        if row_sum[i] <= 0.0:
            out[i, :] = 0.0
            out[i, 0] = row_w[i]
        else:
            out[i, :] *= row_w[i] / row_sum[i]
    col_res = col_w - out.sum(axis=0)
    deficits = [j for j in range(k) if col_res[j] > 0.0]
    for j in deficits:
        need = col_res[j]
        for target in np.argsort(-col_res):
            if need <= 0.0:
                break
            if col_res[target] >= 0.0 or target == j:
                continue
            excess = -col_res[target]
            for i in range(m):
                if need <= 0.0 or excess <= 0.0:
                    break
                delta = min(need, excess, out[i, target])
                if delta <= 0.0:
                    continue
                out[i, target] -= delta
                out[i, j] += delta
                need -= delta
                excess -= delta
            col_res[target] = -excess
        col_res[j] = need
    return out


def wasserstein_p(mu: DiscreteMeasure, nu: DiscreteMeasure, p: int) -> tuple[float, CouplingPlan]:
    """Exact d_p for p in {1, 2} with an optimal plan from the LP vertex."""
    if p not in (1, 2):
        raise ValueError(f"p must be 1 or 2, got {p}")
    dist = _pair_costs(mu, nu)
    m, k = dist.shape
    cost = (dist if p == 1 else dist * dist).reshape(-1)

    # equality-constrained transportation LP; one marginal row is redundant
    a_rows = np.zeros((m, m * k))
    for i in range(m):
        a_rows[i, i * k : (i + 1) * k] = 1.0
    a_cols = np.zeros((k, m * k))
    for j in range(k):
        a_cols[j, j::k] = 1.0
    a_eq = np.vstack([a_rows, a_cols[:-1]])
    b_eq = np.concatenate([mu.weights, nu.weights[:-1]])

    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    flow = _repair_vertex_flow(res.x.reshape(m, k), mu.weights, nu.weights)
    if (
        np.abs(flow.sum(axis=1) - mu.weights).max() > 1e-12
        or np.abs(flow.sum(axis=0) - nu.weights).max() > 1e-12
    ):
        flow = _round_to_polytope(flow, mu.weights, nu.weights)
    plan = CouplingPlan(rows=mu.points, cols=nu.points, flow=flow)
    plan.check_marginals(mu, nu)
    value = float(flow.reshape(-1) @ cost)
    return (value if p == 1 else math.sqrt(max(value, 0.0))), plan


def _dyadic_scale(*weight_arrays):
    """Scale float weights to exact integers (floats are dyadic rationals)."""
    fracs = [[Fraction(float(w)) for w in arr] for arr in weight_arrays]
    denom = 1
    for fr in fracs:
        for f in fr:
            denom = max(denom, f.denominator)
    scaled = [[int(f * denom) for f in fr] for fr in fracs]
    return scaled, denom


class _Dinic:
    """Max-flow on exact (arbitrary-precision) integer capacities."""

    def __init__(self, n):
        self.n = n
        self.graph = [[] for _ in range(n)]  # per node: [to, cap, rev_index]

    def add_edge(self, u, v, cap):
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        queue = [s]
        for u in queue:
            for v, cap, _ in self.graph[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        self.level = level
        return level[t] >= 0

    def _dfs(self, u, t, pushed):
        if u == t:
            return pushed
        while self.it[u] < len(self.graph[u]):
            edge = self.graph[u][self.it[u]]
            v, cap, rev = edge
            if cap > 0 and self.level[v] == self.level[u] + 1:
                got = self._dfs(v, t, min(pushed, cap))
                if got > 0:
                    edge[1] -= got
                    self.graph[v][rev][1] += got
                    return got
            self.it[u] += 1
        return 0

    def max_flow(self, s, t):
        total = 0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                pushed = self._dfs(s, t, float("inf"))
                if pushed == 0:
                    break
                total += pushed
        return total


def _bottleneck_feasible(masses_a, masses_b, allowed, denom):
    """Coupling supported on `allowed` pairs exists (up to conservation tol)?

    Returns (feasible, flow matrix of exact integers).
    """
    m, k = allowed.shape
    net = _Dinic(m + k + 2)
    src, sink = m + k, m + k + 1
    for i in range(m):
        net.add_edge(src, i, masses_a[i])
    for j in range(k):
        net.add_edge(m + j, sink, masses_b[j])
    for i in range(m):
        for j in range(k):
            if allowed[i, j]:
                net.add_edge(i, m + j, masses_a[i])
    flow = net.max_flow(src, sink)
    target = min(sum(masses_a), sum(masses_b))
    # (target - flow)/denom <= tol, compared in exact integers
    feasible = (target - flow) * 10**12 <= denom
    plan = np.zeros((m, k), dtype=object)
    if feasible:
        for i in range(m):
            for v, cap, _ in net.graph[i]:
                if m <= v < m + k:
                    plan[i, v - m] = masses_a[i] - cap
    return feasible, plan


def wasserstein_inf(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[float, CouplingPlan]:
    """Bottleneck distance d_inf with a witnessing coupling.

    The optimum is always one of the pairwise distances, so a bisection
    over the sorted distance values with max-flow feasibility checks is
    exact.
    """
    dist = _pair_costs(mu, nu)
    (ma, mb), denom = _dyadic_scale(mu.weights, nu.weights)
    candidates = np.unique(np.concatenate([[0.0], dist.reshape(-1)]))

    lo, hi = 0, len(candidates) - 1
    feasible_hi, plan_hi = _bottleneck_feasible(ma, mb, dist <= candidates[hi], denom)
    if not feasible_hi:
        raise RuntimeError("bottleneck coupling infeasible at maximal distance")
    while lo < hi:
        mid = (lo + hi) // 2
        ok, plan = _bottleneck_feasible(ma, mb, dist <= candidates[mid], denom)
        if ok:
            hi = mid
            plan_hi = plan
        else:
            lo = mid + 1
    flow = np.array(
        [[float(Fraction(int(v), denom)) for v in row] for row in plan_hi], dtype=float
    )
    plan = CouplingPlan(rows=mu.points, cols=nu.points, flow=flow)
    plan.check_marginals(mu, nu, tol=max(MARGINAL_TOL, FLOW_CONSERVATION_TOL * 10))
    return float(candidates[hi]), plan


def _givens(n, p, q, theta):
    g = np.eye(n)
    c, s = math.cos(theta), math.sin(theta)
    g[p, p] = c
    g[q, q] = c
    g[p, q] = -s
    g[q, p] = s
    return g


def distance_to_simplex_family(mu: DiscreteMeasure, n: int | None = None) -> float:
    """d_2 distance from a centered measure to the rotations of the uniform
    centered unit-simplex measure.

    Alternates optimal-coupling solves with weighted Procrustes updates
    (monotone in the squared cost), then polishes with coordinate descent
    over Givens rotation angles.  Reflections cost nothing extra: vertex
    permutations of the simplex realize them, so the orthogonal orbit
    equals the rotation orbit.
    """
    from .geometry import unit_simplex_measure

    if n is None:
        n = mu.dim
    if mu.dim != n:
        raise ValueError(f"measure dim {mu.dim} != requested dim {n}")
    if float(np.linalg.norm(mu.barycenter())) > 1e-8:
        raise ValueError("measure must be centered")
    ref = unit_simplex_measure(n)

    def eval_rot(rot):
        rotated = DiscreteMeasure(ref.points @ rot.T, ref.weights)
        d, plan = wasserstein_p(mu, rotated, 2)
        return d, plan

    def procrustes_from_plan(plan):
        # min over orthogonal R of sum_ij gamma_ij |x_i - R y_j|^2
        h = plan.flow.T @ mu.points  # (n+1, dim) weighted by coupling
        corr = ref.points.T @ h
        u, _, vt = np.linalg.svd(corr)
        return (u @ vt).T

    best_d = math.inf
    seeds = [np.eye(n)]
    if mu.natoms == n + 1:
        # atom-level rigid alignment pins the rotation directly when the
        # weight profiles are compatible
        try:
            from .geometry import align_rigid

            res = align_rigid(ref, mu, allow_reflections=True)
            seeds.insert(0, res.rotation)
        except ValueError:
            pass
    rng = np.random.default_rng(2)
    for _ in range(2):
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        seeds.append(q)
    best_rot = None
    for rot in seeds:
        d, plan = eval_rot(rot)
        for _ in range(60):
            rot_new = procrustes_from_plan(plan)
            d_new, plan_new = eval_rot(rot_new)
            if d_new > d - 1e-16:
                if d_new < d:
                    d, rot, plan = d_new, rot_new, plan_new
                break
            d, rot, plan = d_new, rot_new, plan_new
        if d < best_d:
            best_d, best_rot = d, rot

    # Givens-angle coordinate descent polish
    rot = best_rot
    step = 0.2
    for _ in range(40):
        improved = False
        for p in range(n):
            for q in range(p + 1, n):
                for theta in (step, -step):
                    cand = _givens(n, p, q, theta) @ rot
                    d, _ = eval_rot(cand)
                    if d < best_d - 1e-16:
                        best_d, rot = d, cand
                        improved = True
        if not improved:
            step *= 0.25
            if step < 1e-9:
                break
    return best_d
