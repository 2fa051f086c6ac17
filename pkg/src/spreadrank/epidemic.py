"""Discrete-time SIR Monte Carlo and the epidemic threshold.

Randomness is counter-based: every replication owns a 64-bit stream key derived
from ``(master_seed, node, replication)``, and the uniform used for the
infection attempt along directed edge slot ``e`` is a hash of ``(key, e)``.
Results therefore do not depend on execution order or thread count, and runs at
two different infection probabilities with the same key are coupled edge by
edge (a larger probability never yields a smaller outbreak).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from ._parallel import map_chunks
from .graph import DegreeHistogram, Graph, GraphError

DEFAULT_RUNS = 1000

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_NODE_SALT = np.uint64(0xD6E8FEB86659FD93)
_RUN_SALT = np.uint64(0xA0761D6478BD642F)
_INV_2_53 = 1.0 / 9007199254740992.0

# nodes per work item in all_spreads
_NODE_CHUNK = 16


@numba.njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _stream_key(master_seed, node, run):
    k = _mix(np.uint64(master_seed) + _GOLDEN)
    k = _mix(k ^ (np.uint64(node) * _NODE_SALT + _GOLDEN))
    return _mix(k ^ (np.uint64(run) * _RUN_SALT + _GOLDEN))


@numba.njit(cache=True, inline="always")
def _uniform(key, slot):
    z = _mix(key + (np.uint64(slot) + np.uint64(1)) * _GOLDEN)
    return np.float64(z >> np.uint64(11)) * _INV_2_53


@numba.njit(cache=True, nogil=True)
def _sir_once(indptr, indices, seed, beta, key, mark, epoch, frontier, nxt):
    mark[seed] = epoch
    frontier[0] = seed
    nf = 1
    total = 1
    while nf > 0:
        nn = 0
        for a in range(nf):
            u = frontier[a]
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if mark[v] != epoch and _uniform(key, e) < beta:
                    mark[v] = epoch
                    nxt[nn] = v
                    nn += 1
        total += nn
        frontier, nxt = nxt, frontier
        nf = nn
    return total


@numba.njit(cache=True, nogil=True)
def _spread_chunk(indptr, indices, lo, hi, beta, runs, master_seed):
    n = len(indptr) - 1
    mark = np.zeros(n, np.int64)
    frontier = np.empty(n, np.int64)
    nxt = np.empty(n, np.int64)
    sums = np.zeros(hi - lo, np.int64)
    sumsq = np.zeros(hi - lo, np.int64)
    epoch = 0
    for node in range(lo, hi):
        s = 0
        s2 = 0
        for r in range(runs):
            epoch += 1
            key = _stream_key(master_seed, node, r)
            size = _sir_once(indptr, indices, node, beta, key, mark, epoch,
                             frontier, nxt)
            s += size
            s2 += size * size
        sums[node - lo] = s
        sumsq[node - lo] = s2
    return sums, sumsq


def stream_key(master_seed: int, node: int, run: int) -> int:
    """Stream key of replication ``run`` for ``node`` under ``master_seed``."""
    return int(_stream_key(np.uint64(master_seed), node, run))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"infection probability must lie in [0, 1], got {beta}")
    return beta


def sir_run(g: Graph, seed_node: int, beta: float, key: int) -> int:
    """Final number of recovered nodes (seed included) of one SIR outbreak.

    Each step, every newly infected node makes one Bernoulli(``beta``) attempt
    on each susceptible neighbour, then recovers.  ``key`` selects the random
    stream; equal keys reproduce the same outbreak.
    """
    beta = _check_beta(beta)
    n = g.node_count
    if not 0 <= seed_node < n:
        raise IndexError(f"seed node {seed_node} outside 0..{n - 1}")
    return int(_sir_once(
        g.indptr, g.indices, seed_node, beta, np.uint64(key),
        np.zeros(n, np.int64), 1, np.empty(n, np.int64), np.empty(n, np.int64),
    ))


def _moments(sums: np.ndarray, sumsq: np.ndarray, runs: int):
    mean = sums / runs
    if runs == 1:
        return mean, np.zeros_like(mean)
    # exact integer numerator: non-negative, no cancellation, no int64 overflow
    num = sumsq.astype(object) * runs - sums.astype(object) ** 2
    var = num.astype(np.float64) / (runs * (runs - 1))
    return mean, np.sqrt(var / runs)


def influence_spread(
    g: Graph, node: int, beta: float, runs: int, master_seed: int
) -> tuple[float, float]:
    """Monte Carlo mean outbreak size from ``node`` and its standard error."""
    beta = _check_beta(beta)
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if not 0 <= node < g.node_count:
        raise IndexError(f"node {node} outside 0..{g.node_count - 1}")
    sums, sumsq = _spread_chunk(g.indptr, g.indices, node, node + 1, beta, runs,
                                np.uint64(master_seed))
    mean, se = _moments(sums, sumsq, runs)
    return float(mean[0]), float(se[0])


@dataclass(frozen=True, eq=False)
class SpreadEstimate:
    mean: np.ndarray
    std_error: np.ndarray
    runs: int
    beta: float
    master_seed: int

    @property
    def beta_percent(self) -> float:
        return 100.0 * self.beta

    def to_csv(self, labels) -> str:
        lines = ["node_label,mean_spread,std_error,runs,beta_percent"]
        bp = repr(self.beta_percent)
        for label, m, s in zip(labels, self.mean.tolist(), self.std_error.tolist()):
            lines.append(f"{label},{m!r},{s!r},{self.runs},{bp}")
        return "\n".join(lines) + "\n"


def all_spreads(
    g: Graph, beta: float, runs: int, master_seed: int, workers: int = 1
) -> SpreadEstimate:
    """``influence_spread`` for every node, parallel over node chunks."""
    beta = _check_beta(beta)
    if runs < 1:
        raise ValueError("runs must be >= 1")
    seed = np.uint64(master_seed)
    parts = map_chunks(
        lambda lo, hi: _spread_chunk(g.indptr, g.indices, lo, hi, beta, runs, seed),
        g.node_count, _NODE_CHUNK, workers,
    )
    sums = np.concatenate([p[0] for p in parts])
    sumsq = np.concatenate([p[1] for p in parts])
    mean, se = _moments(sums, sumsq, runs)
    return SpreadEstimate(mean, se, runs, beta, int(master_seed))


@dataclass(frozen=True)
class EpidemicThreshold:
    beta_prime: float
    branching_factor: float

    @property
    def beta_prime_percent(self) -> float:
        return 100.0 * self.beta_prime


def threshold_from_moments(mean_degree: float, second_moment: float) -> EpidemicThreshold:
    """``<k> / (<k^2> - <k>)``: the infection probability at which the expected
    number of secondary infections per reached node reaches one."""
    excess = second_moment - mean_degree
    if not excess > 0:
        raise GraphError(
            "no finite epidemic threshold: second moment of degree must exceed the mean"
        )
    return EpidemicThreshold(mean_degree / excess, excess / mean_degree)


def epidemic_threshold(h: DegreeHistogram) -> EpidemicThreshold:
    n = h.node_count
    mean = h.mean
    if mean <= 0:
        raise GraphError("no finite epidemic threshold: graph has no edges")
    branching = math.fsum(c / n * k * (k - 1) / mean for k, c in h.counts.items())
    if not branching > 1e-300 or h.second_moment <= mean:
        raise GraphError(
            "no finite epidemic threshold: second moment of degree must exceed the mean"
        )
    return EpidemicThreshold(1.0 / branching, branching)
