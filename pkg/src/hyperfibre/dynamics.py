"""Higher-order Kuramoto model with frustration on hypergraphs of rank <= 3.

    dtheta_i/dt = omega_i
                + sigma2 * sum_{pairs {i,j}}    sin(theta_j - theta_i - alpha2)
                + sigma3 * sum_{triples {i,j,k}} sin(theta_j + theta_k - 2 theta_i - alpha3)

One term per occurrence of ``i`` in a hyperedge.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import NonFiniteState
from .hypergraph import DegreeProfile, Hypergraph, seeded_rng
from .partition import Partition

# Dormand-Prince 5(4) tableau; the 5th-order weights propagate the solution.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]


@dataclass(frozen=True)
class KuramotoParams:
    """Couplings, frustrations and initial data.

    ``omega`` and ``theta0`` are either scalars (shared by every node) or
    per-node arrays.
    """

    sigma2: float = 0.2
    sigma3: float = 0.6
    alpha2: float = 0.0
    alpha3: float = 0.0
    omega: float | np.ndarray = 0.0
    theta0: float | np.ndarray = 0.0
    dt: float = 0.1
    t_max: float = 100.0

    @classmethod
    def symmetric(cls, alpha: float, **kw) -> KuramotoParams:
        """Same frustration ``alpha`` on both orders."""
        return cls(alpha2=alpha, alpha3=alpha, **kw)

    @property
    def steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def omega_vector(self, n: int) -> np.ndarray:
        return _vector(self.omega, n, "omega")

    def theta0_vector(self, n: int) -> np.ndarray:
        return _vector(self.theta0, n, "theta0")

    def validate(self, n: int) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_max >= self.dt:
            raise ValueError("t_max must be at least dt")
        self.omega_vector(n)
        self.theta0_vector(n)


def _vector(value, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"{name} has shape {arr.shape}, expected ({n},)")
    return arr


class CouplingStructure:
    """Per-node co-member lists for orders 2 and 3.

    ``pair_nbr[i]`` holds one co-member per pairwise incidence of ``i`` and
    ``triple_nbr[i]`` one co-member pair per 3-body incidence, stored as
    padded index matrices with validity masks.
    """

    def __init__(self, h: Hypergraph):
        bad = sorted({len(e) for e in h.hyperedges} - {2, 3})
        if bad:
            raise ValueError(f"dynamics support hyperedge orders 2 and 3 only, found orders {bad}")
        n = h.node_count
        pairs: list[list[int]] = [[] for _ in range(n)]
        triples: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e in h.hyperedges:
            if len(e) == 2:
                a, b = e
                pairs[a].append(b)
                pairs[b].append(a)
            else:
                a, b, c = e
                triples[a].append((b, c))
                triples[b].append((a, c))
                triples[c].append((a, b))
        self.node_count = n
        self.pairs = pairs
        self.triples = triples
        self.pair_nbr, self.pair_mask = _pad([[(j,) for j in row] for row in pairs], n, 1)
        self.triple_nbr, self.triple_mask = _pad(triples, n, 2)
        self.pair_nbr = self.pair_nbr[..., 0]

    def k2(self) -> np.ndarray:
        return self.pair_mask.sum(axis=1)

    def k3(self) -> np.ndarray:
        return self.triple_mask.sum(axis=1)


def _pad(rows, n: int, width: int):
    k = max((len(r) for r in rows), default=0)
    idx = np.zeros((n, k, width), dtype=np.intp)
    mask = np.zeros((n, k), dtype=bool)
    for i, r in enumerate(rows):
        if r:
            idx[i, : len(r)] = r
            mask[i, : len(r)] = True
    idx = np.where(mask[..., None], idx, np.arange(n)[:, None, None])
    return idx, mask


def _row_sum(terms: np.ndarray, mask: np.ndarray) -> np.ndarray:
    # Sorting before summing makes the sum depend only on the multiset of
    # terms, so nodes with identical inputs get bitwise identical rates.
    if terms.shape[1] == 0:
        return np.zeros(terms.shape[0])
    return np.sort(np.where(mask, terms, 0.0), axis=1).sum(axis=1)


def rhs(c: CouplingStructure, theta: np.ndarray, p: KuramotoParams, omega: np.ndarray | None = None) -> np.ndarray:
    """Phase velocities at state ``theta``."""
    if omega is None:
        omega = p.omega_vector(c.node_count)
    out = np.array(omega, dtype=float, copy=True)
    if c.pair_mask.shape[1]:
        arg = theta[c.pair_nbr] - theta[:, None] - p.alpha2
        out += p.sigma2 * _row_sum(np.sin(arg), c.pair_mask)
    if c.triple_mask.shape[1]:
        arg = theta[c.triple_nbr[..., 0]] + theta[c.triple_nbr[..., 1]] - 2.0 * theta[:, None] - p.alpha3
        out += p.sigma3 * _row_sum(np.sin(arg), c.triple_mask)
    return out


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    phases: np.ndarray

    @property
    def node_count(self) -> int:
        return self.phases.shape[1]

    def __len__(self) -> int:
        return self.phases.shape[0]


def dopri5_step(f, y: np.ndarray, dt: float) -> np.ndarray:
    """One fixed Dormand-Prince step (5th-order solution) of an autonomous ODE."""
    ks = []
    for i in range(6):
        yi = y
        for a, k in zip(_A[i], ks):
            yi = yi + (dt * a) * k
        ks.append(f(yi))
    out = y
    for b, k in zip(_B, ks):
        if b:
            out = out + (dt * b) * k
    return out


def integrate(h: Hypergraph, p: KuramotoParams, coupling: CouplingStructure | None = None) -> Trajectory:
    """Fixed-step Dormand-Prince integration, one stored row per step."""
    n = h.node_count
    p.validate(n)
    c = coupling if coupling is not None else CouplingStructure(h)
    omega = p.omega_vector(n)
    steps = p.steps
    phases = np.empty((steps + 1, n))
    phases[0] = p.theta0_vector(n)
    f = lambda th: rhs(c, th, p, omega)  # noqa: E731
    y = phases[0]
    # Non-finite states are detected explicitly below.
    with np.errstate(invalid="ignore", over="ignore"):
        for s in range(1, steps + 1):
            y = dopri5_step(f, y, p.dt)
            if not np.all(np.isfinite(y)):
                raise NonFiniteState(s, s * p.dt)
            phases[s] = y
    times = np.arange(steps + 1) * p.dt
    return Trajectory(times, phases)


def instantaneous_frequencies(h: Hypergraph, traj: Trajectory, p: KuramotoParams,
                              coupling: CouplingStructure | None = None) -> np.ndarray:
    """Phase velocities evaluated at every stored state (rows x nodes)."""
    c = coupling if coupling is not None else CouplingStructure(h)
    omega = p.omega_vector(h.node_count)
    return np.array([rhs(c, row, p, omega) for row in traj.phases])


def _coherence(phases: np.ndarray) -> float:
    if phases.size == 0:
        return 1.0
    # Referencing the first phase makes equal phases give exactly 1.0.
    z = np.exp(1j * (phases - phases[0])).mean()
    return min(float(abs(z)), 1.0)


def order_parameters(phases_row: np.ndarray, partition: Partition | None = None) -> tuple[float, list[float]]:
    """Global order parameter and, if a partition is given, one value per class."""
    row = np.asarray(phases_row, dtype=float)
    r = _coherence(row)
    local = [] if partition is None else [_coherence(row[c]) for c in partition.classes]
    return r, local


def order_parameter_series(traj: Trajectory, partition: Partition | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Global R(t) and per-class R_a(t) (rows x classes) over a trajectory."""
    ph = traj.phases
    rel = ph - ph[:, :1]
    glob = np.minimum(np.abs(np.exp(1j * rel).mean(axis=1)), 1.0)
    if partition is None:
        return glob, np.empty((len(ph), 0))
    cols = []
    for members in partition.classes:
        sub = ph[:, members]
        cols.append(np.minimum(np.abs(np.exp(1j * (sub - sub[:, :1])).mean(axis=1)), 1.0))
    return glob, np.column_stack(cols)


def _wrap(x: np.ndarray) -> np.ndarray:
    return np.angle(np.exp(1j * x))


def extract_sync_clusters(traj: Trajectory, deg: DegreeProfile, epsilon: float = 1e-6,
                          n_samples: int = 10, seed: int = 0) -> Partition:
    """Group nodes whose trajectories coincide.

    Nodes are first split by degree sequence.  Inside a group, ``i`` and
    ``j`` are linked when their wrapped phase difference is below
    ``epsilon`` at ``n_samples`` random stored times (drawn after the initial
    row when the trajectory has more than one row) and the time-averaged
    pair order parameter satisfies ``1 - <R_ij> < epsilon``.  Clusters are
    the connected components of the links.
    """
    if epsilon <= 0 or n_samples < 1 or len(traj) == 0:
        raise ValueError("need epsilon > 0, n_samples >= 1 and a non-empty trajectory")
    rows = len(traj)
    rng = seeded_rng(seed)
    pool = np.arange(1, rows) if rows > 1 else np.arange(rows)
    samples = rng.choice(pool, size=n_samples, replace=n_samples > len(pool))
    ph = traj.phases
    n = traj.node_count
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for group in deg.groups().classes:
        if len(group) < 2:
            continue
        g = np.asarray(group)
        at = ph[np.ix_(samples, g)]
        close = np.all(np.abs(_wrap(at[:, :, None] - at[:, None, :])) < epsilon, axis=0)
        ii, jj = np.nonzero(np.triu(close, k=1))
        for a, b in zip(ii, jj):
            i, j = g[a], g[b]
            mean_r = np.abs(np.cos((ph[:, i] - ph[:, j]) / 2.0)).mean()
            if 1.0 - mean_r < epsilon:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    return Partition.from_labels(find(i) for i in range(n))


def _mean_order(args) -> float:
    h, p = args
    glob, _ = order_parameter_series(integrate(h, p))
    return float(glob.mean())


def sweep_frustration(h: Hypergraph, alpha2_values: Sequence[float], alpha3_values: Sequence[float],
                      base: KuramotoParams, steps: int = 500, workers: int = 1) -> np.ndarray:
    """Time-averaged global order parameter over a frustration grid.

    Each cell integrates ``steps`` steps of ``base.dt`` and averages R over
    all stored rows (t = 0 included).  Result is indexed
    ``[alpha2 index, alpha3 index]``.
    """
    jobs = [(h, replace(base, alpha2=float(a2), alpha3=float(a3), t_max=steps * base.dt))
            for a2 in alpha2_values for a3 in alpha3_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            values = list(ex.map(_mean_order, jobs))
    else:
        values = [_mean_order(j) for j in jobs]
    return np.array(values, dtype=float).reshape(len(alpha2_values), len(alpha3_values))


# ------------------------------------------------------------------ CSV


def fmt(x: float) -> str:
    """Locale-independent 12-significant-digit formatting."""
    return format(float(x), ".12g")


def trajectory_to_csv(traj: Trajectory, labels: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *labels])
    for t, row in zip(traj.times, traj.phases):
        w.writerow([fmt(t), *(fmt(x) for x in row)])
    return buf.getvalue()


def trajectory_from_csv(text: str) -> tuple[Trajectory, list[str]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not rows[0] or rows[0][0] != "t":
        raise ValueError('trajectory CSV must start with a "t,<labels...>" header')
    labels = rows[0][1:]
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[1] != len(labels) + 1:
        raise ValueError("trajectory CSV rows do not match the header")
    return Trajectory(data[:, 0], data[:, 1:]), labels


def order_parameters_to_csv(traj: Trajectory, partition: Partition | None = None) -> str:
    glob, local = order_parameter_series(traj, partition)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "global", *(f"class{c}" for c in range(local.shape[1]))])
    for t, g, loc in zip(traj.times, glob, local):
        w.writerow([fmt(t), fmt(g), *(fmt(x) for x in loc)])
    return buf.getvalue()


def sweep_to_csv(matrix: np.ndarray, alpha2_values: Sequence[float], alpha3_values: Sequence[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha2\\alpha3", *(fmt(a) for a in alpha3_values)])
    for a2, row in zip(alpha2_values, matrix):
        w.writerow([fmt(a2), *(fmt(x) for x in row)])
    return buf.getvalue()
