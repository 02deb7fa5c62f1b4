"""Command-line interface.

Every command writes one document (JSON by default, TSV on request) that
embeds the resolved configuration.  Exit codes: 0 success, 1 usage error,
2 bad input data.  ``--threads`` only changes speed, so it is left out of
the embedded configuration and outputs stay byte-identical across thread
counts.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .balls import ball_code, ball_table
from .errors import BudgetExceeded, DataError
from .pmetric import partition_distance
from .repspectra import containment_score, read_rep, sample_K
from .rules import check_rule, parse_rule_spec, search_rule
from .schreier import gen_cycle, gen_random_action, gen_torus, read_coloring, read_graph
from .stats import (TypeDistribution, colored_type_dist, correlation_profile, irs_sample,
                    returning_words, type_dist, weak_metric, weak_metric_tail)
from .words import parse_words

# never part of the embedded configuration
_RUNTIME_ONLY = {"threads", "out", "handler"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Output:
    result: dict
    header: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)


def _read_graph(path):
    try:
        return read_graph(path)
    except OSError as exc:
        raise DataError(f"cannot read graph {path}: {exc.strerror}") from None


def _read_coloring(path, k=None):
    try:
        return read_coloring(path, k)
    except OSError as exc:
        raise DataError(f"cannot read coloring {path}: {exc.strerror}") from None


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.command} is randomized and needs --seed")


def _weights_float(d: TypeDistribution) -> dict:
    return {s: float(p) for s, p in d.weights.items()}


# --- commands ---------------------------------------------------------------

def cmd_gen(args) -> str:
    kind, params = args.kind, args.params
    arity = {"cycle": 1, "torus": 2, "random": 2}[kind]
    if len(params) != arity:
        raise UsageError(f"gen {kind} takes {arity} integer parameter(s)")
    if kind == "cycle":
        g = gen_cycle(params[0])
    elif kind == "torus":
        g = gen_torus(*params)
    else:
        _need_seed(args)
        g = gen_random_action(params[0], params[1], args.seed)
    return f"# config: {json.dumps(_config(args), sort_keys=True)}\n" + g.to_text()


def cmd_balls(args) -> Output:
    g = _read_graph(args.graph)
    c = _read_coloring(args.coloring, args.k) if args.coloring else None
    if c is not None:
        c.check_graph(g)
    t = ball_table(g, args.r)
    xs = range(g.n) if args.vertex is None else [args.vertex]
    if args.vertex is not None:
        g.check_vertex(args.vertex)
    codes = [(x, str(t.code(x) if c is None else t.colored_code(x, c.colors))) for x in xs]
    result = {"r": args.r, "m": g.m, "n": g.n,
              "distinct": len({s for _, s in codes}),
              "codes": [{"vertex": x, "code": s} for x, s in codes]}
    return Output(result, ["vertex", "code"], [list(p) for p in codes])


def cmd_typedist(args) -> Output:
    g = _read_graph(args.graph)
    d = (type_dist(g, args.r) if args.coloring is None
         else colored_type_dist(g, args.r, _read_coloring(args.coloring, args.k)))
    result = d.to_json()
    result["probabilities"] = _weights_float(d)
    rows = [[s, d.counts[c], d.denominator, float(d.prob(c))]
            for s, c in zip(result["weights"], d.support)]
    return Output(result, ["code", "count", "denominator", "probability"], rows)


def cmd_weakdist(args) -> Output:
    g1, g2 = _read_graph(args.graph_a), _read_graph(args.graph_b)
    if (args.coloring_a is None) != (args.coloring_b is None):
        raise UsageError("give both --coloring-a and --coloring-b, or neither")
    c1 = c2 = None
    if args.coloring_a:
        c1 = _read_coloring(args.coloring_a, args.k)
        c2 = _read_coloring(args.coloring_b, args.k)
    d = weak_metric(g1, g2, args.rmax, c1, c2)
    tail = weak_metric_tail(args.rmax)
    result = {"distance": float(d), "distance_exact": str(d),
              "tail_bound": float(tail), "tail_bound_exact": str(tail),
              "provenance": {"method": "exact", "truncated_at": args.rmax}}
    return Output(result, ["distance", "distance_exact", "tail_bound"],
                  [[float(d), str(d), float(tail)]])


def cmd_corr_profile(args) -> Output:
    g = _read_graph(args.graph)
    c = _read_coloring(args.coloring, args.k)
    F = parse_words(args.words)
    p = correlation_profile(g, c, F)
    result = p.to_json()
    result["entries"] = p.entries.tolist()
    rows = [[str(w), i + 1, j + 1, int(p.counts[a, i, j]), float(p.entries[a, i, j])]
            for a, w in enumerate(F) for i in range(p.k) for j in range(p.k)]
    return Output(result, ["word", "i", "j", "count", "entry"], rows)


def cmd_pd(args) -> Output:
    _need_seed(args)
    g1, g2 = _read_graph(args.graph_a), _read_graph(args.graph_b)
    rep = partition_distance(g1, g2, args.kmax, args.rmax, mode=args.mode, budget=args.budget,
                             seed=args.seed, include_pd1=args.include_pd1, threads=args.threads)
    result = rep.to_json()
    rows = [[k, float(v), str(v), float(rep.one_sided[k][0]), float(rep.one_sided[k][1])]
            for k, v in rep.pd_k.items()]
    rows.append(["total", float(rep.pd), str(rep.pd), "", ""])
    return Output(result, ["k", "pd_k", "pd_k_exact", "a_to_b", "b_to_a"], rows)


def _rule_output(report) -> Output:
    result = report.to_json()
    return Output(result, ["violations", "n", "violating_fraction", "certified", "method"],
                  [[report.violations, report.n, str(report.violating_fraction),
                    report.certified, report.method]])


def _load_rule(args, g):
    rule = parse_rule_spec(args.rule)
    if args.template_vertex is None:
        return rule
    if rule.builtin is None:
        raise UsageError("--template-vertex only applies to builtin rules")
    g.check_vertex(args.template_vertex)
    return replace(rule, template=ball_code(g, args.template_vertex, rule.r))


def cmd_rule_check(args) -> Output:
    g = _read_graph(args.graph)
    rule = _load_rule(args, g)
    return _rule_output(check_rule(g, _read_coloring(args.coloring, rule.k), rule))


def cmd_rule_search(args) -> Output:
    _need_seed(args)
    g = _read_graph(args.graph)
    rule = _load_rule(args, g)
    return _rule_output(search_rule(g, rule, args.budget, args.seed, restarts=args.restarts,
                                    threads=args.threads))


def cmd_irs_sample(args) -> Output:
    _need_seed(args)
    g = _read_graph(args.graph)
    d = TypeDistribution.from_codes(irs_sample(g, args.r, args.count, args.seed))
    result = d.to_json()
    result["probabilities"] = _weights_float(d)
    result["provenance"] = {"method": "sampled", "count": args.count, "seed": args.seed}
    rows = [[s, d.counts[c], float(d.prob(c))] for s, c in zip(result["weights"], d.support)]
    return Output(result, ["code", "count", "frequency"], rows)


def cmd_returning_words(args) -> Output:
    g = _read_graph(args.graph)
    g.check_vertex(args.vertex)
    ws = [str(w) for w in returning_words(g, args.vertex, args.r)]
    return Output({"vertex": args.vertex, "r": args.r, "words": ws}, ["word"], [[w] for w in ws])


def _complex_rows(arr) -> list:
    return [[float(z.real), float(z.imag)] for z in np.ravel(arr)]


def cmd_rep_k(args) -> Output:
    _need_seed(args)
    rep = read_rep(args.rep)
    F = parse_words(args.words)
    cloud = sample_K(rep, F, args.n, args.budget, args.seed, threads=args.threads)
    result = cloud.to_json()
    rows = [[p, str(w), i + 1, j + 1, float(z.real), float(z.imag)]
            for p in range(len(cloud)) for a, w in enumerate(F)
            for i in range(args.n) for j in range(args.n)
            for z in [cloud.points[p, a, i, j]]]
    return Output(result, ["point", "word", "i", "j", "re", "im"], rows)


def cmd_rep_contain(args) -> Output:
    _need_seed(args)
    a, b = read_rep(args.rep_a), read_rep(args.rep_b)
    res = containment_score(a, b, parse_words(args.words), args.n, args.budget, args.seed,
                            threads=args.threads)
    return Output(res.to_json(), ["score", "worst_point", "points"],
                  [[res.score, res.worst, len(res.minima)]])


# --- plumbing ---------------------------------------------------------------

def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _RUNTIME_ONLY}


def render(args, out: Output) -> str:
    config = _config(args)
    if args.format == "tsv":
        lines = [f"# config: {json.dumps(config, sort_keys=True)}", "\t".join(out.header)]
        lines += ["\t".join(str(v) for v in row) for row in out.rows]
        return "\n".join(lines) + "\n"
    doc = {"command": args.command, "version": __version__, "config": config,
           "result": out.result}
    return json.dumps(doc, indent=2) + "\n"


def _common(p: argparse.ArgumentParser, seed=False, threads=False):
    p.add_argument("-o", "--out", help="write here instead of standard output")
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    if seed:
        p.add_argument("--seed", type=int, help="random seed (required)")
    if threads:
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: all cores); does not change results")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schreierstats", description="Local statistics of finite Schreier graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, handler: Callable, help: str, **kw):
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        _common(p, **kw)
        return p

    p = sub.add_parser("gen", help="generate a graph file")
    p.set_defaults(handler=cmd_gen)
    p.add_argument("kind", choices=["cycle", "torus", "random"])
    p.add_argument("params", type=int, nargs="+")
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out")

    p = add("balls", cmd_balls, "rooted ball code of each vertex")
    p.add_argument("graph")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--vertex", type=int)
    p.add_argument("--coloring")
    p.add_argument("--k", type=int)

    p = add("typedist", cmd_typedist, "type distribution at radius r")
    p.add_argument("graph")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--coloring")
    p.add_argument("--k", type=int)

    p = add("weakdist", cmd_weakdist, "truncated weak-topology distance")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--rmax", type=int, required=True)
    p.add_argument("--coloring-a")
    p.add_argument("--coloring-b")
    p.add_argument("--k", type=int)

    p = add("corr-profile", cmd_corr_profile, "color correlation profile over a word list")
    p.add_argument("graph")
    p.add_argument("--coloring", required=True)
    p.add_argument("--words", required=True, help="comma separated, e.g. e,a,aB")
    p.add_argument("--k", type=int)

    p = add("pd", cmd_pd, "partition pseudometric", seed=True, threads=True)
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--rmax", type=int, required=True)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--include-pd1", action="store_true")

    p = add("rule-check", cmd_rule_check, "violations of a rule by a coloring")
    p.add_argument("graph")
    p.add_argument("coloring")
    p.add_argument("--rule", required=True, help="rule JSON path or builtin:NAME:key=val,...")
    p.add_argument("--template-vertex", type=int,
                   help="restrict a builtin rule to the ball of this vertex")

    p = add("rule-search", cmd_rule_search, "search for a good coloring", seed=True, threads=True)
    p.add_argument("graph")
    p.add_argument("--rule", required=True, help="rule JSON path or builtin:NAME:key=val,...")
    p.add_argument("--template-vertex", type=int,
                   help="restrict a builtin rule to the ball of this vertex")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--restarts", type=int, default=4)

    p = add("irs-sample", cmd_irs_sample, "ball codes at random vertices", seed=True, threads=True)
    p.add_argument("graph")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--count", type=int, required=True)

    p = add("returning-words", cmd_returning_words, "words of length <= r fixing a vertex")
    p.add_argument("graph")
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--r", type=int, required=True)

    p = add("rep-k", cmd_rep_k, "sampled Gram-point cloud of a representation",
            seed=True, threads=True)
    p.add_argument("rep")
    p.add_argument("--words", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=500)

    p = add("rep-contain", cmd_rep_contain, "weak-containment score of rep A in rep B",
            seed=True, threads=True)
    p.add_argument("rep_a")
    p.add_argument("rep_b")
    p.add_argument("--words", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=200)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = args.handler(args)
        text = out if isinstance(out, str) else render(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
