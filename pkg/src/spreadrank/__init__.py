"""Benchmark centrality measures as predictors of SIR spreading power."""
from .centrality import (
    MEASURES,
    CentralityScores,
    Ranking,
    betweenness_centrality,
    closeness_centrality,
    compute_measure,
    degree_centrality,
    eigenvector_centrality,
    pagerank,
    q_neighborhood,
    rank_nodes,
    shell_decomposition,
)
from .epidemic import (
    EpidemicThreshold,
    SpreadEstimate,
    all_spreads,
    epidemic_threshold,
    influence_spread,
    sir_run,
    stream_key,
)
from .graph import (
    DegreeHistogram,
    Graph,
    GraphError,
    NetworkStats,
    ParseError,
    degree_histogram,
    greatest_connected_component,
    parse_edge_list,
    power_law_fit,
    read_edge_list,
    summary_stats,
)
from .imprecision import (
    ImprecisionCurve,
    TopSet,
    average_curves,
    beta_sweep,
    imprecision,
    imprecision_curve,
    pairwise_difference,
    top_set,
)
from .oracle import ExactSpread, exact_all_spreads, exact_influence_spread

__version__ = "0.1.0"
