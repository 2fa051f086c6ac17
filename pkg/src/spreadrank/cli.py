"""Command-line front end: ``spreadrank {stats,centrality,spread,oracle,imprecision}``."""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import centrality, epidemic, graph, oracle
from .config import ConfigError, ExperimentConfig
from .imprecision import (
    DEFAULT_BETA_MULTIPLES,
    DEFAULT_P_GRID,
    ImprecisionCurve,
    average_curves,
    by_multiple,
    curves_to_csv,
    imprecision,
    imprecision_curve,
    pairwise_difference,
)

log = logging.getLogger("spreadrank")

CACHE_VERSION = "spread-v1"


class CommandError(RuntimeError):
    pass


# ---------------------------------------------------------------- outputs


class Outputs:
    """Collects output files and writes them all-or-nothing."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.files: dict[Path, str] = {}

    def add(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        self.files[path] = text
        return path

    def commit(self) -> list[Path]:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        tmps = []
        try:
            for path, text in self.files.items():
                tmp = path.with_name(path.name + ".tmp")
                tmps.append(tmp)
                tmp.write_text(text, encoding="utf-8")
            for tmp, path in zip(tmps, self.files):
                os.replace(tmp, path)
        except BaseException:
            for tmp in tmps:
                tmp.unlink(missing_ok=True)
            raise
        return list(self.files)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# ---------------------------------------------------------------- loading


def load_network(name: str, path) -> graph.Graph:
    try:
        g = graph.read_edge_list(path)
    except graph.ParseError as exc:
        raise CommandError(f"{path}: {exc}") from None
    except OSError as exc:
        raise CommandError(f"{path}: {exc.strerror or exc}") from None
    gcc = graph.greatest_connected_component(g)
    log.info(
        "%s: %d nodes, %d edges; greatest connected component %d nodes, %d edges",
        name, g.node_count, g.edge_count, gcc.node_count, gcc.edge_count,
    )
    return gcc


def graph_digest(g: graph.Graph) -> str:
    return hashlib.sha256(g.to_edge_list().encode("utf-8")).hexdigest()


def resolve_betas(g: graph.Graph, cfg: ExperimentConfig, default_multiples):
    """List of ``(beta fraction, multiple or None)`` from the config."""
    if cfg.beta_percent:
        return [(v / 100.0, None) for v in cfg.beta_percent]
    multiples = cfg.beta_multiple or list(default_multiples)
    beta_prime = epidemic.epidemic_threshold(graph.degree_histogram(g)).beta_prime
    out = []
    for m in multiples:
        beta = m * beta_prime
        if beta > 1.0:
            raise CommandError(
                f"beta multiple {m} of threshold {100 * beta_prime:.4g}% exceeds 100%"
            )
        out.append((beta, m))
    return out


class SpreadCache:
    """Content-addressed spread estimates keyed by (graph, beta, runs, seed)."""

    def __init__(self, root):
        self.root = Path(root)

    def _path(self, digest, beta, runs, seed) -> Path:
        key = f"{CACHE_VERSION}|{digest}|{beta!r}|{runs}|{seed}"
        return self.root / (hashlib.sha256(key.encode()).hexdigest() + ".csv")

    def get(self, g, digest, beta, runs, seed, workers) -> epidemic.SpreadEstimate:
        path = self._path(digest, beta, runs, seed)
        if path.is_file():
            rows = path.read_text(encoding="utf-8").splitlines()[1:]
            if len(rows) == g.node_count:
                cols = [r.rsplit(",", 4) for r in rows]
                mean = np.array([float(c[1]) for c in cols])
                se = np.array([float(c[2]) for c in cols])
                log.info("spread cache hit %s", path.name)
                return epidemic.SpreadEstimate(mean, se, runs, beta, seed)
        est = epidemic.all_spreads(g, beta, runs, seed, workers)
        _atomic_write(path, est.to_csv(g.labels))
        return est


# ---------------------------------------------------------------- commands


def cmd_stats(cfg: ExperimentConfig) -> Outputs:
    outs = Outputs(cfg.out)
    for name, path in cfg.networks:
        g = load_network(name, path)
        stats = graph.summary_stats(g)
        text = stats.to_csv(name)
        sys.stdout.write(text)
        outs.add(f"{name}_stats.csv", text)
    return outs


def scores_to_csv(g: graph.Graph, scores: centrality.CentralityScores) -> str:
    lines = ["node_label,score"]
    values = scores.values.tolist()
    for i in centrality.rank_nodes(scores):
        lines.append(f"{g.labels[i]},{float(values[i])!r}")
    return "\n".join(lines) + "\n"


def _measure(g, measure, cfg):
    return centrality.compute_measure(
        g, measure, pagerank_variant=cfg.pagerank_variant, damping=cfg.damping,
        workers=cfg.workers,
    )


def cmd_centrality(cfg: ExperimentConfig) -> Outputs:
    outs = Outputs(cfg.out)
    for name, path in cfg.networks:
        g = load_network(name, path)
        for measure in cfg.measures:
            outs.add(f"{name}_{measure}.csv", scores_to_csv(g, _measure(g, measure, cfg)))
    return outs


def _beta_tag(beta: float) -> str:
    return f"{100 * beta:.10g}"


def cmd_spread(cfg: ExperimentConfig) -> Outputs:
    outs = Outputs(cfg.out)
    for name, path in cfg.networks:
        g = load_network(name, path)
        for beta, mult in resolve_betas(g, cfg, default_multiples=[1.1]):
            if mult is not None:
                log.info("%s: beta multiple %s resolves to %s%%", name, mult, 100 * beta)
            est = epidemic.all_spreads(g, beta, cfg.runs, cfg.seed, cfg.workers)
            outs.add(f"{name}_spread_{_beta_tag(beta)}.csv", est.to_csv(g.labels))
    return outs


def cmd_oracle(cfg: ExperimentConfig, node: str | None = None) -> Outputs:
    outs = Outputs(cfg.out)
    betas = cfg.beta_percent or [50.0]
    for name, path in cfg.networks:
        g = load_network(name, path)
        for bp in betas:
            try:
                spreads = oracle.exact_all_spreads(g, bp / 100.0)
            except oracle.EnumerationLimitError as exc:
                raise CommandError(f"{name}: {exc}") from None
            if node is not None:
                if node not in g.labels:
                    raise CommandError(f"{name}: node {node!r} not in the graph")
                spreads = [spreads[g.labels.index(node)]]
            outs.add(f"{name}_oracle_{_beta_tag(bp / 100.0)}.csv",
                     oracle.exact_to_csv(g, spreads))
    return outs


ExtraMeasure = Callable[[graph.Graph, epidemic.SpreadEstimate], np.ndarray]


def cmd_imprecision(
    cfg: ExperimentConfig, extra_measures: Mapping[str, ExtraMeasure] | None = None
) -> Outputs:
    """Imprecision curves per network, plus cross-network averages and differences.

    ``extra_measures`` maps a name to ``fn(graph, spreads) -> scores`` for
    measures evaluated alongside the built-in ones.
    """
    extra_measures = dict(extra_measures or {})
    outs = Outputs(cfg.out)
    cache = SpreadCache(Path(cfg.out) / "cache")
    if cfg.x == "beta":
        p_values = cfg.p or [5.0]
        if len(p_values) != 1:
            raise CommandError("a beta sweep takes exactly one p value")
        default_multiples = DEFAULT_BETA_MULTIPLES
    else:
        p_values = cfg.p or list(DEFAULT_P_GRID)
        default_multiples = [1.1]

    per_network: dict[str, list[ImprecisionCurve]] = {}
    for name, path in cfg.networks:
        g = load_network(name, path)
        digest = graph_digest(g)
        fixed = {m: _measure(g, m, cfg) for m in cfg.measures}
        betas = resolve_betas(g, cfg, default_multiples)
        sweep: dict[str, list] = {}
        curves = []
        for beta, mult in betas:
            est = cache.get(g, digest, beta, cfg.runs, cfg.seed, cfg.workers)
            scores = list(fixed.values()) + [
                centrality.CentralityScores(k, np.asarray(fn(g, est), dtype=float))
                for k, fn in extra_measures.items()
            ]
            if cfg.x == "p":
                for s in scores:
                    c = imprecision_curve(est, s, p_values, network=name)
                    if mult is not None:
                        c = dataclasses.replace(c, beta_multiple=mult)
                    curves.append(c)
            else:
                for s in scores:
                    sweep.setdefault(s.measure, []).append(
                        (est.beta_percent, imprecision(est, s, p_values[0]),
                         mult)
                    )
        if cfg.x == "beta":
            mults = tuple(m for _, m in betas)
            for measure, pts in sweep.items():
                curves.append(ImprecisionCurve(
                    measure=measure, network=name, beta_percent=None,
                    x_kind="beta_percent",
                    points=tuple((bp, eps) for bp, eps, _ in pts),
                    runs=cfg.runs, master_seed=cfg.seed,
                    meta={"p": p_values[0], "beta_multiples": mults}
                    if None not in mults else {},
                ))
        per_network[name] = curves
        outs.add(f"imprecision_{name}.csv",
                 curves_to_csv(curves + _diffs(curves, cfg.diff)))

    if len(per_network) >= 2:
        averaged = _average(per_network, cfg)
        outs.add("imprecision_average.csv",
                 curves_to_csv(averaged + _diffs(averaged, cfg.diff)))
    return outs


def _group_key(curve: ImprecisionCurve):
    if curve.x_kind == "p":
        return curve.measure, curve.beta_multiple or curve.beta_percent
    return curve.measure, None


def _average(per_network, cfg) -> list[ImprecisionCurve]:
    groups: dict[tuple, list] = {}
    for curves in per_network.values():
        for c in curves:
            if c.x_kind == "beta_percent" and c.meta.get("beta_multiples"):
                c = by_multiple(c)
            groups.setdefault(_group_key(c), []).append(c)
    return [average_curves(cs) for cs in groups.values()]


def _diffs(curves, pairs) -> list[ImprecisionCurve]:
    out = []
    index = {_group_key(c): c for c in curves}
    for pair in pairs:
        a, sep, b = pair.partition("-")
        if not sep:
            raise CommandError(f"difference spec {pair!r} must look like 'a-b'")
        for (measure, extra), ca in index.items():
            cb = index.get((b, extra))
            if measure == a and cb is not None:
                out.append(pairwise_difference(ca, cb))
    return out


# ---------------------------------------------------------------- argparse


_FLAG_KEYS = {
    "measures": "measures",
    "beta_percent": "beta_percent",
    "beta_multiple": "beta_multiple",
    "p": "p",
    "x": "x",
    "runs": "runs",
    "seed": "seed",
    "workers": "workers",
    "out": "out",
    "pagerank_variant": "pagerank_variant",
    "damping": "damping",
    "diff": "diff",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spreadrank",
        description="Score centrality measures as predictors of SIR spreading power.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("networks", nargs="*", metavar="EDGE_LIST",
                        help="edge-list files, optionally as name=path")
    shared.add_argument("--seed", help="master seed (unsigned 64-bit)")
    shared.add_argument("--workers", help="worker threads")
    shared.add_argument("--out", help="output directory (default: results)")
    shared.add_argument("--config", help="key = value config file")

    measures = argparse.ArgumentParser(add_help=False)
    measures.add_argument("--measures", help="comma-separated tokens or 'all'")
    measures.add_argument("--pagerank-variant", dest="pagerank_variant",
                          choices=("pure", "damped"))
    measures.add_argument("--damping")

    beta = argparse.ArgumentParser(add_help=False)
    beta.add_argument("--beta-percent", dest="beta_percent",
                      help="infection probability in percent (comma list)")
    beta.add_argument("--beta-multiple", dest="beta_multiple",
                      help="multiples of the epidemic threshold (comma list)")
    beta.add_argument("--runs", help="replications per node")

    sub.add_parser("stats", parents=[shared], help="network summary statistics")
    sub.add_parser("centrality", parents=[shared, measures], help="centrality scores")
    sub.add_parser("spread", parents=[shared, beta], help="Monte Carlo spreading power")
    p_or = sub.add_parser("oracle", parents=[shared], help="exact spread on tiny graphs")
    p_or.add_argument("--beta-percent", dest="beta_percent")
    p_or.add_argument("--node", help="report only this node label")
    p_im = sub.add_parser("imprecision", parents=[shared, measures, beta],
                          help="imprecision curves")
    p_im.add_argument("--x", choices=("p", "beta"), help="curve abscissa")
    p_im.add_argument("--p", help="p grid in percent (comma list)")
    p_im.add_argument("--diff", help="measure differences, e.g. kshell-eigenvector")
    return parser


def effective_config(args: argparse.Namespace, environ=None) -> ExperimentConfig:
    """Defaults, then config file, then environment, then flags."""
    cfg = ExperimentConfig()
    if args.config:
        try:
            cfg.update_from_text(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"{args.config}: {exc.strerror or exc}") from None
    cfg.update_from_env(environ)
    if args.networks:
        cfg.set_text("networks", ",".join(args.networks))
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            cfg.set_text(key, str(value))
    return cfg


COMMANDS = {
    "stats": cmd_stats,
    "centrality": cmd_centrality,
    "spread": cmd_spread,
    "oracle": cmd_oracle,
    "imprecision": cmd_imprecision,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = effective_config(args)
        cfg.validate(need_seed=args.command in ("spread", "imprecision"))
        if not cfg.networks:
            raise ConfigError("no edge-list files given")
        if args.command == "oracle":
            outs = cmd_oracle(cfg, node=args.node)
        else:
            outs = COMMANDS[args.command](cfg)
        for path in outs.commit():
            log.info("wrote %s", path)
    except (ConfigError, CommandError, graph.GraphError, ArithmeticError,
            ValueError, OSError) as exc:
        print(f"spreadrank {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
