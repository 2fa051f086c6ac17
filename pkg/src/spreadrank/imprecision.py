"""Imprecision of centrality rankings against simulated spreading power."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .centrality import CentralityScores, Ranking, rank_nodes
from .epidemic import SpreadEstimate, all_spreads, epidemic_threshold
from .graph import Graph, degree_histogram

DEFAULT_P_GRID = tuple(range(1, 11))
DEFAULT_BETA_MULTIPLES = (1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0)

AVERAGE_NETWORK = "__average__"
DIFF_NETWORK = "__diff__"

CURVE_HEADER = "network,measure,beta_percent,runs,master_seed,x_kind,x,epsilon"


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TopSet:
    p: float
    members: frozenset[int]


def top_set_size(p: float, n: int) -> int:
    """``max(1, round(p * n / 100))`` with halves rounded up, in exact arithmetic."""
    if not 0 < p <= 100:
        raise ValueError(f"p must lie in (0, 100], got {p}")
    exact = Fraction(str(p)) * n / 100
    return max(1, math.floor(exact + Fraction(1, 2)))


def top_set(ranking: Ranking, p: float, n: int) -> TopSet:
    k = top_set_size(p, n)
    return TopSet(p, frozenset(ranking.order[:k].tolist()))


def _mean_over(order: np.ndarray, spreads: np.ndarray, k: int) -> float:
    return math.fsum(spreads[order[:k]].tolist()) / k


def imprecision(
    spreads: SpreadEstimate | np.ndarray,
    scores: CentralityScores | np.ndarray,
    p: float,
    *,
    _rankings: tuple[Ranking, Ranking] | None = None,
) -> float:
    """``1 - M_c / M_eff`` for the top ``p`` percent of nodes.

    ``M_eff`` averages the spread of the nodes with the largest spreads and
    ``M_c`` that of the nodes ranked highest by the measure; both sets have the
    same size and ties are broken by node index.
    """
    m = np.asarray(getattr(spreads, "mean", spreads), dtype=np.float64)
    values = np.asarray(getattr(scores, "values", scores), dtype=np.float64)
    if len(m) != len(values):
        raise ValueError(
            f"spreads cover {len(m)} nodes but scores cover {len(values)}"
        )
    eff, measured = _rankings or (rank_nodes(m), rank_nodes(values))
    k = top_set_size(p, len(m))
    m_eff = _mean_over(eff.order, m, k)
    m_c = _mean_over(measured.order, m, k)
    return 1.0 - m_c / m_eff


@dataclass(frozen=True)
class ImprecisionCurve:
    measure: str
    network: str
    beta_percent: float | None
    x_kind: str
    points: tuple[tuple[float, float], ...]
    runs: int | None = None
    master_seed: int | None = None
    beta_multiple: float | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.points)

    @property
    def epsilons(self) -> tuple[float, ...]:
        return tuple(e for _, e in self.points)

    def csv_rows(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            return repr(float(v)) if isinstance(v, float) else str(v)

        head = [self.network, self.measure, fmt(self.beta_percent), fmt(self.runs),
                fmt(self.master_seed), self.x_kind]
        return [",".join(head + [fmt(float(x)), fmt(float(e))]) for x, e in self.points]


def curves_to_csv(curves: Sequence[ImprecisionCurve]) -> str:
    rows = [CURVE_HEADER]
    for c in curves:
        rows.extend(c.csv_rows())
    return "\n".join(rows) + "\n"


def imprecision_curve(
    spreads: SpreadEstimate,
    scores: CentralityScores,
    p_grid: Sequence[float] = DEFAULT_P_GRID,
    network: str = "",
) -> ImprecisionCurve:
    if len(p_grid) == 0:
        raise ValueError("p grid is empty")
    rankings = (rank_nodes(spreads.mean), rank_nodes(scores))
    points = tuple(
        (float(p), imprecision(spreads, scores, p, _rankings=rankings)) for p in p_grid
    )
    return ImprecisionCurve(
        measure=scores.measure,
        network=network,
        beta_percent=spreads.beta_percent,
        x_kind="p",
        points=points,
        runs=spreads.runs,
        master_seed=spreads.master_seed,
    )


def beta_sweep(
    g: Graph,
    scores: Mapping[str, CentralityScores] | Sequence[CentralityScores],
    beta_multiples: Sequence[float] = DEFAULT_BETA_MULTIPLES,
    p: float = 5,
    runs: int = 1000,
    master_seed: int = 0,
    *,
    workers: int = 1,
    network: str = "",
    spread_fn=None,
) -> list[ImprecisionCurve]:
    """Imprecision at fixed ``p`` for each ``beta = multiple * beta'``.

    Scores are computed once by the caller; spreads are simulated once per
    multiple and shared across measures.  ``spread_fn(beta)`` may replace the
    direct simulation (e.g. to serve cached estimates).
    """
    if isinstance(scores, Mapping):
        scores = list(scores.values())
    beta_prime = epidemic_threshold(degree_histogram(g)).beta_prime
    if spread_fn is None:
        def spread_fn(beta):
            return all_spreads(g, beta, runs, master_seed, workers)

    points: dict[str, list[tuple[float, float]]] = {s.measure: [] for s in scores}
    multiples: list[float] = []
    for mult in beta_multiples:
        beta = min(1.0, mult * beta_prime)
        est = spread_fn(beta)
        multiples.append(float(mult))
        for s in scores:
            points[s.measure].append((est.beta_percent, imprecision(est, s, p)))
    return [
        ImprecisionCurve(
            measure=s.measure,
            network=network,
            beta_percent=None,
            x_kind="beta_percent",
            points=tuple(points[s.measure]),
            runs=runs,
            master_seed=master_seed,
            meta={"p": p, "beta_multiples": tuple(multiples)},
        )
        for s in scores
    ]


def _check_grids(curves: Sequence[ImprecisionCurve]) -> None:
    first = curves[0]
    for c in curves[1:]:
        if c.x_kind != first.x_kind or c.xs != first.xs:
            raise GridMismatchError(
                f"curve grids differ: {first.x_kind}={first.xs} vs {c.x_kind}={c.xs}"
            )


def _shared(values):
    values = set(values)
    return values.pop() if len(values) == 1 else None


def average_curves(curves: Sequence[ImprecisionCurve]) -> ImprecisionCurve:
    """Pointwise equal-weight mean of epsilon over curves sharing one grid."""
    if not curves:
        raise ValueError("no curves to average")
    if len({c.measure for c in curves}) != 1:
        raise GridMismatchError("curves to average must share one measure")
    _check_grids(curves)
    # exact rational mean, rounded once: averaging copies reproduces the input
    columns = zip(*(c.epsilons for c in curves))
    mean = [float(sum(map(Fraction, col)) / len(curves)) for col in columns]
    first = curves[0]
    return replace(
        first,
        network=AVERAGE_NETWORK,
        beta_percent=_shared(c.beta_percent for c in curves),
        runs=_shared(c.runs for c in curves),
        master_seed=_shared(c.master_seed for c in curves),
        points=tuple(zip(first.xs, mean)),
        meta={},
    )


def pairwise_difference(a: ImprecisionCurve, b: ImprecisionCurve) -> ImprecisionCurve:
    """Pointwise ``eps_a - eps_b``; positive where ``a`` is the worse identifier."""
    _check_grids([a, b])
    return replace(
        a,
        measure=f"{a.measure}-{b.measure}",
        network=DIFF_NETWORK,
        beta_percent=a.beta_percent if a.beta_percent == b.beta_percent else None,
        points=tuple((x, ea - eb) for (x, ea), eb in zip(a.points, b.epsilons)),
        meta={},
    )


def by_multiple(curve: ImprecisionCurve) -> ImprecisionCurve:
    """Re-key a beta sweep by threshold multiple so sweeps from networks with
    different thresholds share a grid."""
    mults = curve.meta.get("beta_multiples")
    if curve.x_kind != "beta_percent" or mults is None:
        raise ValueError("curve is not a beta sweep")
    return replace(
        curve,
        x_kind="beta_multiple",
        points=tuple(zip(mults, curve.epsilons)),
    )
