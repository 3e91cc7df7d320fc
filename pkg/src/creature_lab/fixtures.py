"""Canonical JSON fixtures.

Top-level keys: params, tree, specfns, creatures, conditions, labelings.
Canonical form sorts object keys and all node/assignment lists, so
parse-then-emit is the identity on canonical documents and every
implementation produces identical bytes.

Schema:
  params     {"imax": N, "n1": [...], "n2": [...], "n3": [...]}
  tree       {"width": W, "edges": [[parent, child], ...], "nodes": [...]}
  specfns    [{"assignments": [[node, value], ...], "bound": N}, ...]
  creatures  [{"i": N, "base": ASSIGN, "valrange": [ASSIGN, ...], "k": N}, ...]
  conditions [{"depth": D, "nodes": [{"fn": ASSIGN, "level": L,
               "parent": idx|null, "klabel": N}, ...],
               "coverage": {"k": N, "alpha": N, "u": [...]} | null}, ...]
  labelings  [{"condition": idx, "values": [[leaf-node-idx, value], ...]}, ...]
"""

from __future__ import annotations

import json
from typing import Any

from .creature import Creature, SimpleCreature
from .errors import ConstructionError
from .forcing import ConditionFragment, Coverage
from .params import GrowthSequences, make_growth
from .specfn import SpecFn
from .tree_model import AmbientTree, build_tree


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def specfn_to_fixture(fn: SpecFn) -> dict:
    return {"assignments": [list(p) for p in fn.pairs], "bound": fn.bound}


def specfn_from_fixture(doc: dict) -> SpecFn:
    return SpecFn.make({int(a): int(b) for a, b in doc["assignments"]}, bound=doc.get("bound", 0))


def params_to_fixture(g: GrowthSequences) -> dict:
    return {"imax": g.imax, "n1": list(g.n1), "n2": list(g.n2), "n3": list(g.n3)}


def params_from_fixture(doc: dict) -> GrowthSequences:
    return make_growth(doc["imax"], (doc["n1"], doc["n2"], doc["n3"]))


def tree_to_fixture(t: AmbientTree) -> dict:
    edges = sorted([par, child] for child, par in t.parent.items())
    return {"width": t.width, "edges": edges, "nodes": list(t.nodes)}


def tree_from_fixture(doc: dict) -> AmbientTree:
    return build_tree(doc["width"], [tuple(e) for e in doc["edges"]], nodes=doc.get("nodes", []))


def creature_to_fixture(c: Creature | SimpleCreature) -> dict:
    k = c.k if isinstance(c, Creature) else 1
    simple = c.simple if isinstance(c, Creature) else c
    return {
        "i": simple.i,
        "base": specfn_to_fixture(simple.base)["assignments"],
        "valrange": sorted(
            specfn_to_fixture(fn)["assignments"] for fn in simple.valrange
        ),
        "k": k,
    }


def creature_from_fixture(doc: dict) -> Creature:
    base = SpecFn.make({int(a): int(b) for a, b in doc["base"]})
    vr = [SpecFn.make({int(a): int(b) for a, b in mem}) for mem in doc["valrange"]]
    return Creature(SimpleCreature.make(doc["i"], base, vr), k=doc.get("k", 1))


def condition_to_fixture(p: ConditionFragment) -> dict:
    order = list(p.fns)  # level-major, canonical within levels
    index = {fn: j for j, fn in enumerate(order)}
    nodes = []
    for fn in order:
        par = p.parent[fn]
        nodes.append(
            {
                "fn": [list(pair) for pair in fn.pairs],
                "level": p.level_of(fn),
                "parent": index[par] if par is not None else None,
                "klabel": p.klabel[fn],
            }
        )
    cov = None
    if p.coverage is not None:
        cov = {"k": p.coverage.k, "alpha": p.coverage.alpha, "u": sorted(p.coverage.u)}
    return {"depth": p.depth, "nodes": nodes, "coverage": cov}


def condition_from_fixture(doc: dict) -> ConditionFragment:
    fns = [SpecFn.make({int(a): int(b) for a, b in node["fn"]}) for node in doc["nodes"]]
    parent: dict[SpecFn, SpecFn | None] = {}
    klabel: dict[SpecFn, int] = {}
    for fn, node in zip(fns, doc["nodes"]):
        par = node["parent"]
        parent[fn] = fns[par] if par is not None else None
        klabel[fn] = node["klabel"]
    cov = None
    if doc.get("coverage"):
        c = doc["coverage"]
        cov = Coverage(k=c["k"], alpha=c["alpha"], u=frozenset(c["u"]))
    return ConditionFragment(parent=parent, klabel=klabel, coverage=cov)


def labeling_to_fixture(p: ConditionFragment, values: dict[SpecFn, int], cond_index: int = 0) -> dict:
    index = {fn: j for j, fn in enumerate(p.fns)}
    return {
        "condition": cond_index,
        "values": sorted([index[leaf], v] for leaf, v in values.items()),
    }


def labeling_from_fixture(doc: dict, p: ConditionFragment) -> dict[SpecFn, int]:
    order = list(p.fns)
    return {order[j]: v for j, v in doc["values"]}


def empty_document() -> dict:
    return {
        "params": None,
        "tree": None,
        "specfns": [],
        "creatures": [],
        "conditions": [],
        "labelings": [],
    }


def load_document(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConstructionError("fixture document must be a JSON object")
    base = empty_document()
    base.update(doc)
    return base


def save_document(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(doc))
