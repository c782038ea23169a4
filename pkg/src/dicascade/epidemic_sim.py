"""Event-driven SIR simulation with broadcast transmission on a fixed graph.

An infected node waits an Exp(lam) time and then infects every susceptible
out-neighbour at once; independently it recovers after an Exp(nu) time.
Because nobody returns to the susceptible state, only the first broadcast
of a node can change anything, so each node schedules a single broadcast
that races its recovery.  ``repeated_broadcasts=True`` keeps broadcasting
at rate ``lam`` until recovery and exists to check that claim.
"""

from __future__ import annotations

import heapq
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from .graph import DirectedGraph, degree_census
from .rng import STREAM_REPLICA, exponential, make_rng
from .trajectory import Trajectory

INF = math.inf

_BROADCAST = 0
_RECOVER = 1


class NodeState(IntEnum):
    SUSCEPTIBLE = 0
    INFECTED = 1
    RECOVERED = 2


class TransitionError(RuntimeError):
    """A node attempted a transition outside S -> I -> R."""


@dataclass(frozen=True)
class EpidemicParams:
    lam: float
    nu: float
    init_frac: float
    t_max: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"infection rate must be > 0, got {self.lam}")
        if not self.nu >= 0:
            raise ValueError(f"recovery rate must be >= 0, got {self.nu}")
        if not 0.0 <= self.init_frac <= 1.0:
            raise ValueError(f"initial fraction must lie in [0, 1], got {self.init_frac}")
        if not self.t_max > 0:
            raise ValueError(f"horizon must be > 0, got {self.t_max}")


def seed_infection(g: DirectedGraph, params: EpidemicParams, seed) -> np.ndarray:
    """Initial state vector with ``round(init_frac * N)`` infected nodes.

    Seeds are chosen uniformly without replacement.  A positive fraction
    that rounds to zero still infects one node (with a warning).
    """
    rng = make_rng(seed)
    count = int(math.floor(params.init_frac * g.n + 0.5))
    if count == 0 and params.init_frac > 0:
        warnings.warn(
            f"init_frac={params.init_frac} of {g.n} nodes rounds to 0; infecting 1 node",
            stacklevel=2,
        )
        count = 1
    state = np.full(g.n, NodeState.SUSCEPTIBLE, dtype=np.int8)
    state[rng.choice(g.n, size=count, replace=False)] = NodeState.INFECTED
    return state


def _adjacency(g: DirectedGraph) -> tuple[list, list]:
    cached = g.__dict__.get("_py_adjacency")
    if cached is None:
        cached = (g.out_ptr.tolist(), g.out_nbrs.tolist())
        object.__setattr__(g, "_py_adjacency", cached)
    return cached


def simulate_node_times(
    g: DirectedGraph,
    params: EpidemicParams,
    init: np.ndarray,
    seed,
    *,
    t_end: Optional[float] = None,
    repeated_broadcasts: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the event loop up to ``t_end`` (default ``t_max``).

    Returns per-node infection and recovery times, ``inf`` where the event
    did not happen before the horizon.  Initially infected nodes have
    infection time 0.
    """
    rng = make_rng(seed)
    t_end = params.t_max if t_end is None else t_end
    lam, nu = params.lam, params.nu
    ptr, nbrs = _adjacency(g)

    init = np.asarray(init)
    if init.shape != (g.n,):
        raise ValueError("initial state vector does not match the graph size")
    if np.any(init == NodeState.RECOVERED):
        raise ValueError("initial state may only contain susceptible and infected nodes")
    state = init.astype(np.int8).tolist()
    t_inf = [INF] * g.n
    t_rec = [INF] * g.n
    rec_due = [INF] * g.n
    queue: list[tuple[float, int, int]] = []

    def infect(u: int, t: float) -> None:
        t_inf[u] = t
        tr = t + exponential(rng, nu)
        rec_due[u] = tr
        tb = t + exponential(rng, lam)
        if tr <= t_end:
            heapq.heappush(queue, (tr, u, _RECOVER))
        if tb < tr and tb <= t_end:
            heapq.heappush(queue, (tb, u, _BROADCAST))

    # canonical node order so the draw sequence does not depend on input layout
    for u in np.flatnonzero(init == NodeState.INFECTED).tolist():
        infect(u, 0.0)

    while queue:
        t, u, kind = heapq.heappop(queue)
        if state[u] != NodeState.INFECTED:
            raise TransitionError(f"event {kind} for node {u} in state {state[u]}")
        if kind == _RECOVER:
            state[u] = NodeState.RECOVERED
            t_rec[u] = t
            continue
        for v in nbrs[ptr[u] : ptr[u + 1]]:
            if state[v] == NodeState.SUSCEPTIBLE:
                state[v] = NodeState.INFECTED
                infect(v, t)
        if repeated_broadcasts:
            tb = t + exponential(rng, lam)
            if tb < rec_due[u] and tb <= t_end:
                heapq.heappush(queue, (tb, u, _BROADCAST))

    return np.array(t_inf), np.array(t_rec)


def class_index(g: DirectedGraph) -> tuple[list, np.ndarray, np.ndarray]:
    """Classes in census order, per-node class index, and class sizes."""
    census = degree_census(g)
    classes = list(census)
    lookup = {c: j for j, c in enumerate(classes)}
    idx = np.array([lookup[c] for c in zip(g.in_deg.tolist(), g.out_deg.tolist())])
    return classes, idx, np.array([census[c] for c in classes])


def _check_grid(grid, t_max: float) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > t_max:
        raise ValueError(f"grid must lie within [0, {t_max}]")
    return grid


def times_to_trajectory(g: DirectedGraph, grid: np.ndarray, t_inf, t_rec) -> Trajectory:
    """Sample node event times onto ``grid`` as right-continuous step functions."""
    classes, idx, _ = class_index(g)
    nt, nc = len(grid), len(classes)
    # first grid index at which each event is visible; nt means never
    gi = np.searchsorted(grid, t_inf, side="left")
    gr = np.searchsorted(grid, t_rec, side="left")
    ever_i = np.zeros((nt + 1, nc))
    ever_r = np.zeros((nt + 1, nc))
    np.add.at(ever_i, (gi, idx), 1)
    np.add.at(ever_r, (gr, idx), 1)
    ever_i = np.cumsum(ever_i, axis=0)[:nt]
    ever_r = np.cumsum(ever_r, axis=0)[:nt]
    return Trajectory.from_classes(grid, classes, (ever_i - ever_r) / g.n, ever_r / g.n)


def simulate(
    g: DirectedGraph,
    params: EpidemicParams,
    init: np.ndarray,
    grid,
    seed,
    *,
    repeated_broadcasts: bool = False,
) -> Trajectory:
    """Simulate one realization and sample per-class fractions onto ``grid``."""
    grid = _check_grid(grid, params.t_max)
    t_inf, t_rec = simulate_node_times(
        g, params, init, seed, t_end=params.t_max, repeated_broadcasts=repeated_broadcasts
    )
    return times_to_trajectory(g, grid, t_inf, t_rec)


@dataclass
class ReplicaResult:
    mean: Trajectory
    runs: list


def replica_seed(base_seed: int, r: int) -> tuple[int, int, int]:
    return (int(base_seed), STREAM_REPLICA, int(r))


def _one_replica(args) -> Trajectory:
    g, params, grid, key = args
    init = seed_infection(g, params, make_rng(*key, 0))
    return simulate(g, params, init, grid, make_rng(*key, 1))


def run_replicas(
    g: DirectedGraph,
    params: EpidemicParams,
    grid,
    base_seed: int,
    m: int,
    *,
    workers: int = 1,
    replica_keys: Optional[Sequence[tuple]] = None,
) -> ReplicaResult:
    """Run ``m`` independent replicas and average them pointwise.

    Replica ``r`` draws its seed set and its dynamics from streams derived
    from ``(base_seed, r)``, so the result does not depend on ``workers``.
    ``replica_keys`` overrides the derived keys.
    """
    if m < 1:
        raise ValueError(f"replica count must be >= 1, got {m}")
    grid = _check_grid(grid, params.t_max)
    keys = list(replica_keys) if replica_keys is not None else [replica_seed(base_seed, r) for r in range(m)]
    if len(keys) != m:
        raise ValueError("need exactly one key per replica")
    jobs = [(g, params, grid, key) for key in keys]
    if workers > 1 and m > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_one_replica, jobs))
    else:
        runs = [_one_replica(job) for job in jobs]
    # fixed summation order keeps the mean independent of scheduling
    ci = np.zeros_like(runs[0].class_i)
    cr = np.zeros_like(runs[0].class_r)
    for run in runs:
        ci += run.class_i
        cr += run.class_r
    mean = Trajectory.from_classes(grid, runs[0].classes, ci / m, cr / m)
    return ReplicaResult(mean, runs)
