"""(r,k)-rules on colored balls, violation checks and good-coloring search."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .balls import BallCode, ball_table
from .errors import BadParameter, ColorCountMismatch, DataError, ShapeMismatch
from .schreier import Coloring, SchreierGraph
from .search import BallObjective, ColoredIndex, all_colorings, greedy, multi_start

VIOLATOR_CAP = 100


def _neighbor_blocks(code: BallCode) -> set[int]:
    # words of length one sit at positions 1..2m; the root's own block is not a neighbor
    return {code.labels[i] for i in range(1, 2 * code.m + 1)} - {0}


def _proper(code: BallCode, params) -> bool:
    root = code.colors[0]
    return all(code.colors[b] != root for b in _neighbor_blocks(code))


def _independent(code: BallCode, params) -> bool:
    marked = params["marked"]
    if code.colors[0] != marked:
        return True
    return all(code.colors[b] != marked for b in _neighbor_blocks(code))


def _matching(code: BallCode, params) -> bool:
    # color 1 = unmatched, color 2 + letter = matched along that letter
    root = code.colors[0]
    if root == 1:
        return False
    letter = root - 2
    partner = code.labels[1 + letter]
    return code.colors[partner] == 2 + (letter ^ 1)


_BUILTINS: dict[str, Callable] = {
    "proper_coloring": _proper,
    "independent_set": _independent,
    "perfect_matching": _matching,
}


@dataclass(frozen=True, eq=False)
class Rule:
    """An (r,k)-rule.

    Extensional rules carry a ``template`` (uncolored code) and the set of
    ``accepted`` colored codes over it.  Builtin rules are predicates on
    colored codes; their template may be ``None``, in which case they apply
    to whatever ball a vertex has.
    """

    r: int
    k: int
    template: BallCode | None
    accepted: frozenset | None = None
    builtin: str | None = None
    params: dict = field(default_factory=dict)

    def accepts(self, code: BallCode) -> bool:
        if self.template is not None and code.uncolored() != self.template:
            return False
        if self.builtin is not None:
            return _BUILTINS[self.builtin](code, self.params)
        return code in self.accepted

    def to_json(self) -> dict:
        if self.builtin is not None:
            out = {"builtin": self.builtin, "params": dict(self.params)}
            if self.template is not None:
                out["template"] = self.template.serialize()
            return out
        return {"r": self.r, "k": self.k, "m": self.template.m,
                "template": self.template.serialize(),
                "accepted": sorted(c.serialize() for c in self.accepted)}


def builtin_rule(name: str, template: BallCode | None = None, **params) -> Rule:
    if name == "proper_coloring":
        k = int(params.get("k", 0))
        if k < 1:
            raise BadParameter("proper_coloring needs k >= 1")
        params = {"k": k}
    elif name == "independent_set":
        k, marked = int(params.get("k", 2)), int(params.get("marked", 1))
        if k < 1 or not 1 <= marked <= k:
            raise BadParameter("independent_set needs 1 <= marked <= k")
        params = {"k": k, "marked": marked}
    elif name == "perfect_matching":
        m = int(params.get("m", 0))
        if m < 1:
            raise BadParameter("perfect_matching needs m >= 1")
        k = 1 + 2 * m
        params = {"m": m}
    else:
        raise BadParameter(f"unknown builtin rule {name!r}; known: {sorted(_BUILTINS)}")
    if template is not None and (template.r != 1 or template.colored):
        raise BadParameter("builtin rules live on uncolored radius-1 templates")
    return Rule(1, k, template, None, name, params)


def rule_from_codes(template: BallCode, accepted, k: int | None = None) -> Rule:
    accepted = frozenset(accepted)
    for c in accepted:
        if not c.colored or c.uncolored() != template:
            raise ShapeMismatch(f"accepted code {c} is not a coloring of the template")
    if k is None:
        k = max((max(c.colors) for c in accepted), default=1)
    return Rule(template.r, k, template, accepted)


def parse_rule_spec(spec: str) -> Rule:
    """``builtin:NAME[:key=val,...]`` or a path to a rule JSON file."""
    if spec.startswith("builtin:"):
        _, name, *rest = spec.split(":", 2)
        params = {}
        for part in (rest[0].split(",") if rest else []):
            key, sep, val = part.partition("=")
            if not sep:
                raise BadParameter(f"rule parameter {part!r} must look like key=value")
            params[key.strip()] = int(val)
        return builtin_rule(name, **params)
    try:
        data = json.loads(Path(spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read rule {spec!r}: {exc}") from None
    return rule_from_json(data)


def rule_from_json(data: dict) -> Rule:
    template = None
    if "template" in data:
        template = BallCode.parse(data["template"], m=data.get("m"), r=data.get("r"))
    if "builtin" in data:
        return builtin_rule(data["builtin"], template=template, **data.get("params", {}))
    if template is None:
        raise DataError("rule JSON needs either 'builtin' or 'template'")
    accepted = [BallCode.parse(s, m=template.m, r=template.r) for s in data.get("accepted", [])]
    return rule_from_codes(template, accepted, data.get("k"))


@dataclass
class RuleReport:
    coloring: Coloring
    violations: int
    n: int
    violators: list[int]
    certified: bool = False
    method: str = "check"

    @property
    def violating_fraction(self) -> Fraction:
        return Fraction(self.violations, self.n)

    def to_json(self) -> dict:
        return {
            "violating_fraction": float(self.violating_fraction),
            "violating_fraction_exact": str(self.violating_fraction),
            "violations": self.violations,
            "n": self.n,
            "violators": self.violators,
            "violators_capped": self.violations > len(self.violators),
            "certified": self.certified,
            "method": self.method,
            "coloring": self.coloring.colors.tolist(),
        }


class RuleObjective(BallObjective):
    """Number of violating vertices."""

    def __init__(self, index: ColoredIndex, rule: Rule):
        super().__init__(index)
        self.rule = rule
        self.cache: dict = {}

    def vertex_score(self, x):
        key = self.index.key(self.rule.r, x, self.colors)
        v = self.cache.get(key)
        if v is None:
            v = self.cache[key] = 0.0 if self.rule.accepts(self.index.code_of(key)) else 1.0
        return v


def _violators(g: SchreierGraph, c: np.ndarray, rule: Rule) -> list[int]:
    t = ball_table(g, rule.r)
    cache: dict = {}
    bad = []
    for x in range(g.n):
        code = t.colored_code(x, c)
        ok = cache.get(code)
        if ok is None:
            ok = cache[code] = rule.accepts(code)
        if not ok:
            bad.append(x)
    return bad


def check_rule(g: SchreierGraph, c: Coloring, rule: Rule) -> RuleReport:
    """Vertices whose colored r-ball is not accepted by the rule."""
    c.check_graph(g)
    if c.k != rule.k:
        raise ColorCountMismatch(f"coloring uses k={c.k}, rule expects k={rule.k}")
    bad = _violators(g, c.colors, rule)
    return RuleReport(c, len(bad), g.n, bad[:VIOLATOR_CAP])


def _exhaustive_counts(g: SchreierGraph, rule: Rule, colorings: np.ndarray) -> np.ndarray:
    """Violation count of every coloring in the batch."""
    t = ball_table(g, rule.r)
    k = rule.k
    viol = np.zeros(len(colorings), dtype=np.int64)
    for cid, code in enumerate(t.codes):
        xs = np.flatnonzero(t.code_id == cid)
        if rule.template is not None and code != rule.template:
            viol += len(xs)
            continue
        b = int(t.nblocks[xs[0]])
        powers = k ** np.arange(b, dtype=np.int64)
        pats = (colorings[:, t.reps[xs, :b]] - 1) @ powers  # (P, |xs|)
        uniq, inv = np.unique(pats, return_inverse=True)
        bad = np.array([
            not rule.accepts(BallCode(rule.r, t.m, code.labels,
                                      tuple(int(p // k**j % k) + 1 for j in range(b))))
            for p in uniq], dtype=np.int64)
        viol += bad[inv.reshape(pats.shape)].sum(axis=1)
    return viol


def search_rule(g: SchreierGraph, rule: Rule, budget: int, seed: int,
                restarts: int = 4, threads: int | None = None) -> RuleReport:
    """Best coloring found for the rule.

    Exhaustive (and certified) when k^n <= budget; otherwise a greedy
    best-response sweep followed by annealing restarts.  A heuristic result
    is certified only when it has no violations at all.
    """
    n, k = g.n, rule.k
    if budget < 0:
        raise BadParameter("budget must be nonnegative")
    if budget > 0 and k**n <= budget:
        best_v, best_c = None, None
        for chunk in all_colorings(n, k):
            viol = _exhaustive_counts(g, rule, chunk)
            i = int(np.argmin(viol))
            if best_v is None or viol[i] < best_v:
                best_v, best_c = int(viol[i]), chunk[i].copy()
        bad = _violators(g, best_c, rule)
        return RuleReport(Coloring(best_c, k), len(bad), n, bad[:VIOLATOR_CAP], True, "exhaustive")
    index = ColoredIndex(g, rule.r, radii=[rule.r])
    make = lambda: RuleObjective(index, rule)  # noqa: E731
    colors = greedy(make(), n, k)
    method = "greedy"
    if budget > 0:
        res = multi_start(make, n, k, budget, seed, restarts, init=colors, lower_bound=0,
                          threads=threads)
        colors = res.colors
        method = "anneal" if res.moves else "greedy"
    bad = _violators(g, colors, rule)
    return RuleReport(Coloring(colors, k), len(bad), n, bad[:VIOLATOR_CAP], not bad, method)
