"""Seeded property suites with counterexample shrinking.

Each suite draws premise-satisfying instances from its own generator,
checks the corresponding constructive guarantee, and on failure shrinks the
instance (removing value-range members, pruning labels) to a locally minimal
counterexample, which is embedded in the report as a fixture.  Reports are
pure functions of (suite, count, seed) and identical under any --jobs split:
instance j is generated from Random(seed * 1_000_003 + j).
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import fixtures as fx
from .creature import Creature, SimpleCreature, norm0, normhalf, norms, normstar, validate_creature
from .errors import BudgetError, DomainError, PreconditionError, ValidationError
from .forcing import (
    ConditionFragment,
    NotRelated,
    Projection,
    creature_at,
    fragments_agree_below,
    fuse,
    kind_of,
    leq,
    leq_n,
    leq_strict_f,
    normalize,
    restrict,
    smoothen,
    validate_condition,
)
from .generators import (
    PROFILES,
    chain_antichain_tree,
    depth2_fragment,
    depth3_fragment,
    diagonal_creature,
    extend_fragment,
    profile,
    random_creature,
    random_labeling,
    random_upward_closed,
    shrink_fragment_above,
    smooth_target_fragment,
    two_level_tree,
    wide_tree,
)
from .homogenize import LeafLabeling, _cone_labels, decide, purify
from .oracle import oracle_norm0
from .ops import fill, glue, halve, rebase, shrink_to_norm
from .params import default_shape, halving_witness, log2ceil, log2ceil_ratio, make_growth
from .specfn import SpecFn
from .tree_model import AmbientTree, build_tree

SUITES = [
    "growth",
    "normshape",
    "norm-oracle",
    "glue",
    "fill",
    "rebase",
    "shrink",
    "bigness",
    "halving",
    "leq",
    "fusion",
    "smoothen",
    "purify",
    "decide",
    "fact2.6",
    "claim2.8",
]

_SEED_STRIDE = 1_000_003


@dataclass
class SuiteOutcome:
    ok: bool
    premise_hit: bool
    info: dict


def _rng_for(seed: int, index: int) -> random.Random:
    return random.Random(seed * _SEED_STRIDE + index)


# -- shared contexts ---------------------------------------------------------


def _creature_context():
    tree = chain_antichain_tree()
    params = make_growth(0, ((9,), (16,), (12,)))
    return tree, params


def _condition_context():
    tree = two_level_tree()
    params = profile("cond2")
    return tree, params


def _random_valid_creature(rng, tree, params, max_members=4, value_bound=8):
    return random_creature(rng, tree, params, i=0, max_members=max_members, value_bound=value_bound)


# -- suite: growth -----------------------------------------------------------


def _run_growth(rng: random.Random) -> SuiteOutcome:
    imax = rng.randint(0, 3)
    n1 = [rng.randint(2, 5)]
    for _ in range(imax):
        n1.append(n1[-1] * n1[-1] * rng.randint(1, 3))
    n2 = [n1[j] + rng.randint(0, max(0, (n1[j + 1] - 1 - n1[j]) if j < imax else 5))
          for j in range(imax + 1)]
    n3 = [max(j * n1[j] + 1, n2[j] + rng.randint(1, 8)) for j in range(imax + 1)]
    g = make_growth(imax, (tuple(n1), tuple(n2), tuple(n3)))
    g.validate()
    for j in range(imax + 1):
        for k in (0, n1[j] // 2, n1[j]):
            if not (j - 1) * n1[j] + k < n3[j]:
                return SuiteOutcome(False, True, {"derived": (j, k)})
    # fault injection: break one inequality, expect the validator to name it
    bad = list(n2)
    if imax >= 1:
        bad[0] = n1[1]
        try:
            make_growth(imax, (tuple(n1), tuple(bad), tuple(n3)))
            return SuiteOutcome(False, True, {"mutation": "accepted"})
        except ValidationError as e:
            if "n2[0] < n1[1]" not in str(e):
                return SuiteOutcome(False, True, {"mutation_msg": str(e)})
    return SuiteOutcome(True, True, {})


# -- suite: normshape --------------------------------------------------------


def _run_normshape(rng: random.Random) -> SuiteOutcome:
    shape = default_shape()
    k1 = rng.randint(1, 2 ** 8)
    k2 = rng.randint(k1, 2 ** 8)
    n2_ = rng.randint(k2, 2 ** 16)
    n1_ = rng.randint(n2_, 2 ** 16)
    if shape.f(n1_, k1) < shape.f(n2_, k2) - 1e-12:
        return SuiteOutcome(False, True, {"star2": (n1_, n2_, k2, k1)})
    n = rng.randint(1, 2 ** 16)
    k = rng.randint(1, n)
    if n <= k and shape.f(n, k) != 0.0:
        return SuiteOutcome(False, True, {"star4": (n, k)})
    if n % 2 == 0 and shape.f(n // 2, k) < shape.f(n, k) - 1 - 1e-12:
        return SuiteOutcome(False, True, {"star3": (n, k)})
    if shape.norm_geq(n, k, 1) and n >= k + 2:
        kp = halving_witness(shape, n, k)
        if not (k < kp < n):
            return SuiteOutcome(False, True, {"witness_range": (n, k, kp)})
        # exact additivity of the lg shape on the unclamped region
        for _ in range(3):
            np_ = rng.randint(kp + 1, n)
            lhs = shape.f(np_, k)
            rhs = shape.f(np_, kp) + shape.f(kp, k)
            if abs(lhs - rhs) > 1e-9:
                return SuiteOutcome(False, True, {"additivity": (np_, k, kp)})
    return SuiteOutcome(True, True, {})


# -- suite: norm-oracle ------------------------------------------------------


def _run_norm_oracle(rng: random.Random) -> SuiteOutcome:
    tree, params = _creature_context()
    c = _random_valid_creature(rng, tree, params, value_bound=6)
    if c is None:
        return SuiteOutcome(True, False, {})
    fast = norm0(c, tree, params, validate=False)
    slow = oracle_norm0(c, tree, params, validate=False)
    if fast != slow:
        return SuiteOutcome(False, True, {"creature": fx.creature_to_fixture(Creature(c, 1)), "fast": fast, "slow": slow})
    return SuiteOutcome(True, True, {})


# -- suite: glue -------------------------------------------------------------


def _glue_instance(rng, tree, params):
    c = _random_valid_creature(rng, tree, params, max_members=3, value_bound=8)
    if c is None or norm0(c, tree, params, validate=False) < 1:
        return None
    kstar = rng.randint(2, 3)
    if len(c.valrange) * kstar > params.n1[c.i] - 1:
        return None
    used = set()
    for eta in c.valrange:
        used.update(eta.dom())
    free = [x for x in tree.nodes if x not in used]
    extensions = {}
    for eta in c.valrange:
        pool = [x for x in free if all(not tree.comparable(x, y) for y in eta.dom())]
        rng.shuffle(pool)
        picks: list[list[int]] = []
        flat: list[int] = []
        for k in range(kstar):
            if rng.random() < 0.4 or not pool:
                picks.append([])
                continue
            cand = None
            for x in pool:
                if all(not tree.comparable(x, y) and x != y for y in flat):
                    cand = x
                    break
            if cand is None:
                picks.append([])
                continue
            pool.remove(cand)
            flat.append(cand)
            picks.append([cand])
        exts = {}
        ok = True
        for k in range(kstar):
            m = eta.as_dict()
            for x in picks[k]:
                banned = {v for y, v in m.items() if tree.comparable(x, y)}
                options = [v for v in range(params.n3[c.i]) if v not in banned]
                if not options:
                    ok = False
                    break
                m[x] = options[rng.randrange(len(options))]
            if not ok:
                break
            exts[(eta, k)] = SpecFn.make(m, bound=params.n3[c.i])
        if not ok:
            return None
        extensions.update(exts)
    return c, extensions, kstar


def _run_glue(rng: random.Random) -> SuiteOutcome:
    tree, params = _creature_context()
    inst = _glue_instance(rng, tree, params)
    if inst is None:
        return SuiteOutcome(True, False, {})
    c, extensions, kstar = inst
    try:
        res = glue(c, extensions, kstar, tree, params)
    except PreconditionError:
        return SuiteOutcome(True, False, {})
    d = res.creature
    nd = norm0(d, tree, params, validate=False)
    info: dict = {"bound": res.bound, "norm0_d": nd}
    if nd < res.bound:
        info["creature"] = fx.creature_to_fixture(Creature(c, 1))
        return SuiteOutcome(False, True, info)
    try:
        if oracle_norm0(d, tree, params, validate=False, budget=2 * 10 ** 6) != nd:
            return SuiteOutcome(False, True, {"oracle_mismatch": True})
    except BudgetError:
        pass
    ns_c, ns_d = normstar(c, params), normstar(d, params)
    if ns_d < ns_c - log2ceil(kstar):
        return SuiteOutcome(False, True, {"normstar": (ns_c, ns_d, kstar)})
    if ns_d < ns_c - kstar:
        return SuiteOutcome(False, True, {"normstar_weak": (ns_c, ns_d, kstar)})
    # how often the ceiling reading of the bound's log term would promise
    # more than the provable floor form does
    lstar = res.trace["lstar"]
    ceil_bound = min(res.trace["norm0_c"], log2ceil_ratio(params.n2[c.i], lstar), kstar - 1)
    info["ceil_floor_differ"] = int(ceil_bound != res.bound)
    info["ceil_bound_violated"] = int(nd < ceil_bound)
    return SuiteOutcome(True, True, info)


# -- suite: fill -------------------------------------------------------------


def _fill_instance(rng: random.Random, tree, params):
    c = _random_valid_creature(rng, tree, params, max_members=3, value_bound=8)
    if c is None:
        return None
    k = norm0(c, tree, params, validate=False)
    if k < 1:
        return None
    used = set()
    for eta in c.valrange:
        used.update(eta.dom())
    free = [
        x
        for x in tree.nodes
        if x not in used and not any(tree.less(x, y) for y in used)
    ]
    if not free:
        return None
    mmax = min(k, params.n2[c.i] // (1 << k), len(free), 2)
    if mmax < 1:
        return None
    m = rng.randint(1, mmax)
    if len(c.valrange) * math.comb(k, m) > params.n1[c.i]:
        return None
    xs = rng.sample(free, m)
    return c, xs


def _check_fill(c, xs, tree, params):
    """(ok, info) for one fill instance; None when the premise fails late."""
    k = norm0(c, tree, params, validate=False)
    m = len(xs)
    try:
        res = fill(c, xs, tree, params)
    except PreconditionError:
        return None
    d = res.creature
    nd = norm0(d, tree, params, validate=False)
    if nd < k - m:
        return False, {"xs": xs, "norm0_d": nd, "bound": k - m}
    if not all(all(x in nu for x in xs) for nu in d.valrange):
        return False, {"coverage": xs}
    if normstar(d, params) < normstar(c, params) - log2ceil(math.comb(k, m)):
        return False, {"normstar": (normstar(c, params), normstar(d, params))}
    try:
        if oracle_norm0(d, tree, params, validate=False, budget=2 * 10 ** 6) != nd:
            return False, {"oracle_mismatch": True}
    except BudgetError:
        pass
    return True, {"k": k, "m": m}


def _run_fill(rng: random.Random) -> SuiteOutcome:
    tree, params = _creature_context()
    inst = _fill_instance(rng, tree, params)
    if inst is None:
        return SuiteOutcome(True, False, {})
    c, xs = inst
    checked = _check_fill(c, xs, tree, params)
    if checked is None:
        return SuiteOutcome(True, False, {})
    ok, info = checked
    if not ok:
        info["creature"] = fx.creature_to_fixture(Creature(c, 1))
        return SuiteOutcome(False, True, info)
    return SuiteOutcome(True, True, info)


# -- suite: rebase -----------------------------------------------------------


def _diagonal_over_context(rng, tree, params, members: int, slice_size: int = 2):
    """A diagonal creature over an antichain slice of the context tree."""
    antichains = [[3, 4], [3, 5], [4, 5], [6, 7], [6, 8], [7, 8], [3, 4, 5], [6, 7, 8]]
    slices = [s for s in antichains if len(s) <= slice_size and all(x in tree for x in s)]
    if not slices:
        return None
    sl = slices[rng.randrange(len(slices))]
    if members >= params.n1[0]:
        return None
    try:
        return diagonal_creature(0, SpecFn.make({}), sl, members, rng.randint(0, 3), params, tree)
    except (PreconditionError, ValidationError):
        return None


def _run_rebase(rng: random.Random) -> SuiteOutcome:
    # rebasing preserves the kind, so only creatures with nonempty-base kinds
    # can grow their base; the suite works at kind 1
    tree = chain_antichain_tree()
    params = profile("ops")
    base_node = rng.choice([0, 1, 2])
    base = SpecFn.make({base_node: rng.randint(0, 3)})
    slices = [s for s in ([3, 4], [4, 5], [3, 5], [6, 7], [7, 8])
              if all(x in tree and x != base_node for x in s)]
    sl = list(rng.choice(slices))
    members = rng.randint(3, 5)
    try:
        c = diagonal_creature(1, base, sl, members, 5 + rng.randint(0, 4), params, tree)
    except (PreconditionError, ValidationError):
        return SuiteOutcome(True, False, {})
    n0 = norm0(c, tree, params, validate=False)
    if n0 < 2:
        return SuiteOutcome(True, False, {})
    used = {base_node, *sl}
    news = [x for x in tree.nodes if x not in used]
    rng.shuffle(news)
    etastar = None
    for x in news:
        ys = sum(1 for y in sl if tree.less(x, y))
        if ys + 1 >= n0:
            continue
        if (len(base) + 1) * (1 << (n0 + 1)) > params.n2[c.i]:
            continue
        banned = {v for eta in c.valrange for y, v in eta.pairs if tree.comparable(x, y)}
        # the base of the output must live in spec_{n3[i-1]} (creature clause
        # (b)), which is stricter than the raw premise's n3[i] bound
        value_cap = params.n3[c.i - 1] if c.i >= 1 else params.n3[0]
        options = [v for v in range(value_cap) if v not in banned]
        if not options:
            continue
        star_map = base.as_dict()
        star_map[x] = options[rng.randrange(len(options))]
        etastar = SpecFn.make(star_map, bound=params.n3[c.i])
        break
    if etastar is None:
        return SuiteOutcome(True, False, {})
    try:
        res = rebase(c, etastar, tree, params)
    except (PreconditionError, ValidationError):
        return SuiteOutcome(True, False, {})
    d = res.creature
    nd = norm0(d, tree, params, validate=False)
    if nd < res.bound:
        return SuiteOutcome(False, True, {"creature": fx.creature_to_fixture(Creature(c, 1)), "norm0_d": nd, "bound": res.bound})
    if normstar(d, params) < normstar(c, params):
        return SuiteOutcome(False, True, {"normstar_drop": True})
    return SuiteOutcome(True, True, {"l1": res.trace["l1"], "l2": res.trace["l2"]})


# -- suite: shrink -----------------------------------------------------------


def _run_shrink(rng: random.Random) -> SuiteOutcome:
    tree, params = _creature_context()
    c = _random_valid_creature(rng, tree, params)
    if c is None:
        return SuiteOutcome(True, False, {})
    n0 = norm0(c, tree, params, validate=False)
    if n0 < 1 or len(c.valrange) < 2:
        return SuiteOutcome(True, False, {})
    k = rng.randint(1, n0)
    try:
        res = shrink_to_norm(c, k, tree, params)
    except DomainError:
        return SuiteOutcome(True, False, {})
    sub = res.creature
    if norm0(sub, tree, params, validate=False) != k:
        return SuiteOutcome(False, True, {"creature": fx.creature_to_fixture(Creature(c, 1)), "target": k})
    if not set(sub.valrange) <= set(c.valrange):
        return SuiteOutcome(False, True, {"not_subset": True})
    return SuiteOutcome(True, True, {})


# -- suite: bigness ----------------------------------------------------------


def _bigness_violations(c: SimpleCreature, tree, params, klabels=(1, 2)) -> dict:
    """Exhaustive bipartition check of the three norm variants, both log
    conventions for the integer norms.  Returns violation counts."""
    shape = default_shape()
    rec = norms(Creature(c, 1), tree, params, shape, validate=False)
    out = {"norm1_ceil": 0, "norm2_ceil": 0, "norm1_floor": 0, "norm": 0, "splits": 0}
    members = c.valrange
    if len(members) < 2:
        return out
    n0_all = rec.norm0
    nh_all = rec.normhalf

    def floorlog(x: int) -> int:
        return x.bit_length() - 1 if x > 0 else 0

    for mask in range(1, 2 ** len(members) - 1, 2):
        side1 = [m for j, m in enumerate(members) if mask >> j & 1]
        side2 = [m for j, m in enumerate(members) if not mask >> j & 1]
        c1 = SimpleCreature.make(c.i, c.base, side1)
        c2 = SimpleCreature.make(c.i, c.base, side2)
        n01 = norm0(c1, tree, params, validate=False)
        n02 = norm0(c2, tree, params, validate=False)
        nh1 = min(n01, normstar(c1, params))
        nh2 = min(n02, normstar(c2, params))
        out["splits"] += 1
        for k in range(0, log2ceil(n0_all)):
            if log2ceil(n0_all) >= k + 1 and not (log2ceil(n01) >= k or log2ceil(n02) >= k):
                out["norm1_ceil"] += 1
        for k in range(0, log2ceil(nh_all)):
            if log2ceil(nh_all) >= k + 1 and not (log2ceil(nh1) >= k or log2ceil(nh2) >= k):
                out["norm2_ceil"] += 1
        for k in range(0, floorlog(n0_all)):
            if floorlog(n0_all) >= k + 1 and not (floorlog(n01) >= k or floorlog(n02) >= k):
                out["norm1_floor"] += 1
        for kl in klabels:
            f_all = shape.f(nh_all, kl)
            for k in range(0, int(f_all)):
                if f_all >= k + 1 and not (shape.f(nh1, kl) >= k or shape.f(nh2, kl) >= k):
                    out["norm"] += 1
    return out


def _run_bigness(rng: random.Random) -> SuiteOutcome:
    tree, params = _creature_context()
    c = _random_valid_creature(rng, tree, params, max_members=5, value_bound=8)
    if c is None or len(c.valrange) < 2:
        return SuiteOutcome(True, False, {})
    v = _bigness_violations(c, tree, params)
    bad = v["norm1_ceil"] + v["norm2_ceil"] + v["norm"]
    info = dict(v)
    if bad:
        info["creature"] = fx.creature_to_fixture(Creature(c, 1))
        return SuiteOutcome(False, True, info)
    return SuiteOutcome(True, True, info)


# -- suite: halving ----------------------------------------------------------


def _halving_context():
    tree = chain_antichain_tree()
    # wide value range so half-norms reach 6+, exercising the repair path
    params = make_growth(0, ((8193,), (16384,), (8200,)))
    return tree, params


def _run_halving(rng: random.Random) -> SuiteOutcome:
    tree, params = _halving_context()
    shape = default_shape()
    slice_ = rng.choice([[3], [4], [3, 4], [6, 7]])
    members = rng.randint(4, 12)
    try:
        c = diagonal_creature(0, SpecFn.make({}), slice_, members, rng.randint(0, 9), params, tree)
    except (PreconditionError, ValidationError):
        return SuiteOutcome(True, False, {})
    nh = normhalf(c, tree, params)
    if nh < 3:
        return SuiteOutcome(True, False, {})
    k = rng.randint(1, nh // 2)
    if not shape.norm_geq(nh, k, 1) or nh - k < 2:
        return SuiteOutcome(True, False, {})
    cp = Creature(c, k)
    res = halve(cp, shape, tree, params)
    info = {"repaired": int(res.repaired), "kprime": res.kprime}
    if res.creature.simple != c:
        return SuiteOutcome(False, True, {"simple_changed": True})
    if not res.creature.k > k:
        return SuiteOutcome(False, True, {"not_monotone": (k, res.creature.k)})
    if not shape.norm_geq_shifted(nh, res.creature.k, nh, k, 1):
        return SuiteOutcome(False, True, {"drop_gt_1": (nh, k, res.creature.k)})
    # recovery property (informational): count failures over the n' range
    rec_fail = 0
    for np_ in range(res.creature.k + 1, nh + 3):
        if shape.norm_pos(np_, res.creature.k):
            if not shape.norm_geq_shifted(np_, k, nh, k, 0):
                rec_fail += 1
    info["recovery_failures"] = rec_fail
    return SuiteOutcome(True, True, info)


# -- suite: leq --------------------------------------------------------------


def _leq_pair(rng, tree, params):
    shape = default_shape()
    branching = rng.choice([(2, 3), (3, 3), (3, 4), (2, 5)])
    p = depth2_fragment(tree, params, branching=branching)
    mode = rng.choice(["restrict", "shrink", "extend"])
    if mode == "restrict":
        eta = rng.choice(list(p.level_nodes(1)))
        return p, restrict(p, eta)
    if mode == "shrink":
        q = shrink_fragment_above(rng, p, rng.randint(0, 1), tree, params)
        return (p, q) if q is not None else None
    free = [x for x in tree.nodes if all(x not in fn for fn in p.fns)]
    if not free:
        return None
    x = rng.choice(free)
    try:
        q = extend_fragment(p, tree, params, x, rng.randrange(params.n3[-1]), from_level=rng.randint(1, 2))
    except (PreconditionError, ValidationError):
        return None
    return p, q


def _run_leq(rng: random.Random) -> SuiteOutcome:
    tree, params = _condition_context()
    pair = _leq_pair(rng, tree, params)
    if pair is None:
        return SuiteOutcome(True, False, {})
    p, q = pair
    pr = leq(p, q, tree, params)
    if isinstance(pr, NotRelated):
        return SuiteOutcome(False, True, {"not_related": pr.clause})
    ip, iq = kind_of(p, params), kind_of(q, params)
    for eta in q.internal():
        nu = pr(eta)
        # kinds agree under the level shift
        if iq + q.level_of(eta) != ip + p.level_of(nu):
            return SuiteOutcome(False, True, {"kind": str(eta)})
        # the game norm never grows along a projection
        if p.children(nu):
            cq = creature_at(q, eta, params)
            cp_ = creature_at(p, nu, params)
            if norm0(cq, tree, params, validate=False) > norm0(cp_, tree, params, validate=False):
                return SuiteOutcome(False, True, {"norm_monotone": str(eta)})
    info = {"strict_f": int(leq_strict_f(p, q, pr))}
    # transitivity through a restricted cone
    eta = rng.choice(list(q.level_nodes(min(1, q.depth))))
    try:
        r = restrict(q, eta)
    except Exception:
        return SuiteOutcome(True, True, info)
    pr2 = leq(q, r, tree, params)
    if isinstance(pr2, Projection):
        direct = leq(p, r, tree, params)
        composed = pr.compose(pr2)
        if isinstance(direct, NotRelated):
            return SuiteOutcome(False, True, {"transitivity": "direct missing"})
        if direct.mapping != composed.mapping:
            return SuiteOutcome(False, True, {"transitivity": "maps differ"})
    return SuiteOutcome(True, True, info)


# -- suite: fusion -----------------------------------------------------------


def _run_fusion(rng: random.Random) -> SuiteOutcome:
    tree, params = _condition_context()
    shape = default_shape()
    p = depth2_fragment(tree, params, branching=rng.choice([(3, 3), (3, 4), (2, 5)]))
    chain = [p]
    ns = []
    grade = 0
    for _ in range(rng.randint(1, 3)):
        nxt = shrink_fragment_above(rng, chain[-1], grade, tree, params)
        if nxt is None or not leq_n(chain[-1], nxt, grade, tree, params, shape):
            nxt = chain[-1]
        chain.append(nxt)
        ns.append(grade)
        grade += 1
    ns.append(grade)
    try:
        fused = fuse(chain, ns, tree, params, shape)
    except PreconditionError as e:
        return SuiteOutcome(False, True, {"chain": str(e)})
    for q, n in zip(chain, ns):
        if not leq_n(q, fused, n, tree, params, shape):
            return SuiteOutcome(False, True, {"grade": n})
    return SuiteOutcome(True, True, {"len": len(chain)})


# -- suite: smoothen ---------------------------------------------------------


def _run_smoothen(rng: random.Random) -> SuiteOutcome:
    tree, params = _condition_context()
    shape = default_shape()
    hold = rng.choice([[2], [2], [1]])
    try:
        p = smooth_target_fragment(tree, params, alpha=2, branching=(2, 4), hold_out=hold)
    except (PreconditionError, ValidationError):
        return SuiteOutcome(True, False, {})
    m = rng.randint(0, 1)
    try:
        q = smoothen(p, 2, m, tree, params, shape)
    except PreconditionError:
        return SuiteOutcome(True, False, {})
    from .forcing import classify

    cls = classify(q, tree, params, shape)
    if not cls.smooth or cls.alpha != 2:
        return SuiteOutcome(False, True, {"smooth": cls.smooth, "alpha": cls.alpha})
    if not leq_n(p, q, m, tree, params, shape):
        return SuiteOutcome(False, True, {"grade": m})
    pr = leq(p, q, tree, params)
    for eta in q.internal():
        n_new = norm0(creature_at(q, eta, params), tree, params, validate=False)
        n_old = norm0(creature_at(p, pr(eta), params), tree, params, validate=False)
        if log2ceil(n_new) < log2ceil(n_old) - 1:
            return SuiteOutcome(False, True, {"norm1_drop": (n_old, n_new)})
    return SuiteOutcome(True, True, {"m": m})


# -- suite: purify -----------------------------------------------------------


def _run_purify(rng: random.Random) -> SuiteOutcome:
    tree, params = _condition_context()
    shape = default_shape()
    p = depth2_fragment(tree, params, branching=rng.choice([(3, 3), (3, 5), (2, 3)]))
    xset = random_upward_closed(rng, p)
    kstar = rng.randint(0, 1)
    try:
        res = purify(p, xset, kstar, tree, params, shape)
    except PreconditionError:
        return SuiteOutcome(True, False, {})
    q = res.fragment
    if not leq_n(p, q, kstar, tree, params, shape):
        return SuiteOutcome(False, True, {"grade": kstar})
    for nu, alt in res.alternatives.items():
        cone = q.cone_nodes(nu)
        if alt == "disjoint":
            if any(fn in xset for fn in cone):
                return SuiteOutcome(False, True, {"alt": "disjoint broken"})
        else:
            lv = res.inside_levels[nu]
            if not all(fn in xset for fn in cone if q.level_of(fn) >= lv):
                return SuiteOutcome(False, True, {"alt": "inside broken"})
    pr = leq(p, q, tree, params)
    for eta in q.internal():
        nu = pr(eta)
        cq = creature_at(q, eta, params)
        cp_ = creature_at(p, nu, params)
        if set(cq.valrange) == set(cp_.valrange):
            continue
        nh_new, nh_old = normhalf(cq, tree, params), normhalf(cp_, tree, params)
        if log2ceil(nh_new) < log2ceil(nh_old) - 1:
            return SuiteOutcome(False, True, {"norm2_drop": (nh_old, nh_new)})
        kl = max(q.klabel[eta], 1)
        if not shape.norm_geq_shifted(nh_new, kl, nh_old, kl, 1):
            return SuiteOutcome(False, True, {"norm_drop": (nh_old, nh_new, kl)})
    return SuiteOutcome(True, True, {"front": len(res.front)})


# -- suite: decide -----------------------------------------------------------


def _decide_oracle(p, label, m, tree, params, shape, cutoff):
    """Independent exhaustive confirmation that no subfragment decides."""
    from .homogenize import _valid_subfragments, _subfragment

    for keep in _valid_subfragments(p, m + 1, tree, params):
        q = _subfragment(p, keep)
        if not validate_condition(q, tree, params).ok:
            continue
        if not leq_n(p, q, m, tree, params, shape):
            continue
        for lv in range(min(cutoff, q.depth) + 1):
            if all(len(_cone_labels(q, fn, label)) == 1 for fn in q.level_nodes(lv)):
                return True
    return False


def _run_decide(rng: random.Random) -> SuiteOutcome:
    shape = default_shape()
    if rng.random() < 0.3:
        tree = wide_tree(6, 3)
        params = profile("cond3")
        p = depth3_fragment(tree, params)
        m = 0
        cutoff = rng.randint(1, 2)
    else:
        tree, params = _condition_context()
        p = depth2_fragment(tree, params, branching=rng.choice([(2, 3), (3, 3)]))
        m = rng.randint(0, 1)
        cutoff = 1
    label = LeafLabeling(random_labeling(rng, p, values=rng.randint(2, 3)))
    res = decide(p, label, m, tree, params, shape, max_level=cutoff)
    if res.found:
        q = res.fragment
        if not leq_n(p, q, m, tree, params, shape):
            return SuiteOutcome(False, True, {"graded": False})
        if res.level > cutoff:
            return SuiteOutcome(False, True, {"level": res.level})
        for fn in q.level_nodes(res.level):
            vals = _cone_labels(q, fn, label)
            if len(vals) != 1 or res.table[fn] not in vals:
                return SuiteOutcome(False, True, {"cone": str(fn)})
        return SuiteOutcome(True, True, {"found": 1})
    if _decide_oracle(p, label, m, tree, params, shape, cutoff):
        return SuiteOutcome(False, True, {"not_found_wrong": True})
    return SuiteOutcome(True, True, {"found": 0})


# -- suite: fact2.6 ----------------------------------------------------------


def _tall_tree() -> AmbientTree:
    return build_tree(3, [(0, 3), (0, 4), (1, 5), (3, 6), (4, 7), (5, 8)], nodes=[2])


def _run_fact26(rng: random.Random) -> SuiteOutcome:
    tree = _tall_tree()
    params = profile("cond2")
    shape = default_shape()
    try:
        p = smooth_target_fragment(tree, params, alpha=2, branching=(2, 4))
    except (PreconditionError, ValidationError):
        return SuiteOutcome(True, False, {})
    # weakly smooth: coverage k = 0 (u empty here, the strongest case)
    free = [x for x in tree.nodes if all(x not in fn for fn in p.fns)]
    if not free:
        return SuiteOutcome(True, False, {})
    x = rng.choice(free)
    try:
        q = extend_fragment(p, tree, params, x, rng.randrange(20), from_level=2)
    except (PreconditionError, ValidationError):
        return SuiteOutcome(True, False, {})
    pr = leq(p, q, tree, params)
    if isinstance(pr, NotRelated):
        return SuiteOutcome(False, True, {"leq": pr.clause})
    from .tree_model import initial_segment

    seg = initial_segment(tree, p.coverage.alpha) | p.coverage.u
    for nu in q.fns:
        if nu.domset() & seg != pr(nu).domset():
            return SuiteOutcome(False, True, {"fact26": str(nu)})
    return SuiteOutcome(True, True, {})


# -- suite: claim2.8 ---------------------------------------------------------


def _run_claim28(rng: random.Random) -> SuiteOutcome:
    tree, params = _condition_context()
    shape = default_shape()
    p = depth2_fragment(tree, params, branching=rng.choice([(3, 3), (3, 4)]))
    ip = kind_of(p, params)
    # level-size and domain-size bounds re-checked directly
    for lv, fns in enumerate(p.levels()):
        if not len(fns) < params.n1[ip + lv]:
            return SuiteOutcome(False, True, {"levelbound": lv})
        for fn in fns:
            if lv == 0 and ip == 0 and len(fn) == 0:
                continue
            if not len(fn) < params.n2[ip + lv - 1]:
                return SuiteOutcome(False, True, {"dombound": lv})
    # graded chains compose; higher grades imply lower ones
    q = shrink_fragment_above(rng, p, 1, tree, params)
    if q is not None and leq_n(p, q, 1, tree, params, shape):
        r = shrink_fragment_above(rng, q, 1, tree, params)
        if r is not None and leq_n(q, r, 1, tree, params, shape):
            if not leq_n(p, r, 1, tree, params, shape):
                return SuiteOutcome(False, True, {"transitive_leqn": True})
        if not leq_n(p, q, 0, tree, params, shape):
            return SuiteOutcome(False, True, {"grade_weaken": True})
        if isinstance(leq(p, q, tree, params), NotRelated):
            return SuiteOutcome(False, True, {"leqn_implies_leq": True})
    # projection uniqueness on a restricted pair: any clause-satisfying map equals ours
    eta = rng.choice(list(p.level_nodes(1)))
    cone = restrict(p, eta)
    pr = leq(p, cone, tree, params)
    if isinstance(pr, NotRelated):
        return SuiteOutcome(False, True, {"cone_leq": pr.clause})
    alt = _count_projections(p, cone, tree, params)
    if alt != 1:
        return SuiteOutcome(False, True, {"uniqueness": alt})
    # normalize: cone-min leveling
    try:
        nq = normalize(p, tree, params)
    except PreconditionError:
        return SuiteOutcome(True, True, {"normalize": "skipped"})
    prn = leq(p, nq, tree, params)
    if isinstance(prn, NotRelated):
        return SuiteOutcome(False, True, {"normalize_leq": prn.clause})
    for fn in nq.internal():
        target = min(
            norm0(creature_at(p, rho, params), tree, params, validate=False)
            for rho in p.cone_nodes(prn(fn))
            if p.children(rho)
        )
        if norm0(creature_at(nq, fn, params), tree, params, validate=False) != target:
            return SuiteOutcome(False, True, {"normalize_value": str(fn)})
    return SuiteOutcome(True, True, {})


def _count_projections(p, q, tree, params) -> int:
    """Exhaustively count clause-(a)-(f) maps q -> p (small fragments)."""
    levels_p = {fn: p.level_of(fn) for fn in p.fns}
    shift = kind_of(q, params) - kind_of(p, params)
    count = 0
    q_nodes = list(q.fns)
    pools = []
    for fn in q_nodes:
        lv = q.level_of(fn) + shift
        pools.append([g for g in p.fns if levels_p[g] == lv and fn.extends(g)])
    for combo in itertools.product(*pools):
        mp = dict(zip(q_nodes, combo))
        ok = True
        for fn in q_nodes:
            par = q.parent[fn]
            if par is not None:
                if p.parent[mp[fn]] != mp[par]:
                    ok = False
                    break
                tau, nu = mp[fn], par
                if set(tau.dom()) & set(nu.dom()) != set(mp[par].dom()):
                    ok = False
                    break
            if q.klabel[fn] < p.klabel[mp[fn]]:
                ok = False
                break
        if ok:
            count += 1
    return count


_RUNNERS = {
    "growth": _run_growth,
    "normshape": _run_normshape,
    "norm-oracle": _run_norm_oracle,
    "glue": _run_glue,
    "fill": _run_fill,
    "rebase": _run_rebase,
    "shrink": _run_shrink,
    "bigness": _run_bigness,
    "halving": _run_halving,
    "leq": _run_leq,
    "fusion": _run_fusion,
    "smoothen": _run_smoothen,
    "purify": _run_purify,
    "decide": _run_decide,
    "fact2.6": _run_fact26,
    "claim2.8": _run_claim28,
}


def _run_one(suite: str, seed: int, index: int) -> dict:
    rng = _rng_for(seed, index)
    try:
        out = _RUNNERS[suite](rng)
    except BudgetError as e:
        return {"index": index, "status": "budget", "info": {"error": str(e)}}
    except (PreconditionError, ValidationError, DomainError) as e:
        return {"index": index, "status": "fail", "info": {"error": str(e)}}
    if not out.premise_hit:
        return {"index": index, "status": "miss", "info": out.info}
    return {
        "index": index,
        "status": "pass" if out.ok else "fail",
        "info": out.info,
    }


def _run_range(args: tuple[str, int, int, int]) -> list[dict]:
    suite, seed, start, stop = args
    return [_run_one(suite, seed, j) for j in range(start, stop)]


def run_suite(suite: str, count: int, seed: int, jobs: int = 1) -> dict:
    """Run a suite; the report is a pure function of (suite, count, seed)."""
    if suite not in _RUNNERS:
        raise DomainError(f"unknown suite {suite!r}; choose from {SUITES}")
    results: list[dict]
    if jobs > 1 and count >= 8:
        chunk = max(1, count // (jobs * 4))
        ranges = [
            (suite, seed, lo, min(lo + chunk, count)) for lo in range(0, count, chunk)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_range, ranges))
        results = [r for part in parts for r in part]
    else:
        results = _run_range((suite, seed, 0, count))
    results.sort(key=lambda r: r["index"])
    failures = [r for r in results if r["status"] == "fail"]
    budget = [r for r in results if r["status"] == "budget"]
    misses = sum(1 for r in results if r["status"] == "miss")
    shrunk = None
    if failures:
        shrunk = _shrink_failure(suite, seed, failures[0]["index"])
    agg: dict = {}
    for r in results:
        for key, val in r["info"].items():
            if isinstance(val, int) and not isinstance(val, bool):
                agg[key] = agg.get(key, 0) + val
    status = "budget" if budget and not failures else ("fail" if failures else "pass")
    return {
        "suite": suite,
        "count": count,
        "seed": seed,
        "status": status,
        "instances": len(results),
        "premise_hits": len(results) - misses,
        "failures": len(failures),
        "first_failure": failures[0] if failures else None,
        "minimal_counterexample": shrunk,
        "stats": dict(sorted(agg.items())),
    }


def _shrink_failure(suite: str, seed: int, index: int) -> dict | None:
    """Shrink a failing creature-suite instance by dropping members/labels."""
    rng = _rng_for(seed, index)
    if suite == "bigness":
        tree, params = _creature_context()
        c = _random_valid_creature(rng, tree, params, max_members=5, value_bound=8)
        if c is None:
            return None
        current = c

        def fails(cand: SimpleCreature) -> bool:
            if len(cand.valrange) < 2 or not validate_creature(cand, params, tree).ok:
                return False
            v = _bigness_violations(cand, tree, params)
            return v["norm1_ceil"] + v["norm2_ceil"] + v["norm"] > 0

        progress = True
        while progress:
            progress = False
            for eta in current.valrange:
                cand = SimpleCreature.make(
                    current.i, current.base, [f for f in current.valrange if f != eta]
                )
                if fails(cand):
                    current = cand
                    progress = True
                    break
        return fx.creature_to_fixture(Creature(current, 1))
    if suite == "fill":
        tree, params = _creature_context()
        inst = _fill_instance(rng, tree, params)
        if inst is None:
            return None
        c, xs = inst

        def fill_fails(cand: SimpleCreature) -> bool:
            if not validate_creature(cand, params, tree).ok:
                return False
            if norm0(cand, tree, params, validate=False) < 1:
                return False
            checked = _check_fill(cand, xs, tree, params)
            return checked is not None and not checked[0]

        current = c
        progress = True
        while progress:
            progress = False
            for eta in current.valrange:
                if len(current.valrange) < 2:
                    break
                cand = SimpleCreature.make(
                    current.i, current.base, [f for f in current.valrange if f != eta]
                )
                if fill_fails(cand):
                    current = cand
                    progress = True
                    break
        return fx.creature_to_fixture(Creature(current, 1))
    if suite == "norm-oracle":
        tree, params = _creature_context()
        c = _random_valid_creature(rng, tree, params, value_bound=6)
        if c is None:
            return None
        current = c

        def mismatch(cand):
            if not validate_creature(cand, params, tree).ok:
                return False
            return norm0(cand, tree, params, validate=False) != oracle_norm0(
                cand, tree, params, validate=False
            )

        progress = True
        while progress:
            progress = False
            for eta in current.valrange:
                if len(current.valrange) < 2:
                    break
                cand = SimpleCreature.make(
                    current.i, current.base, [f for f in current.valrange if f != eta]
                )
                if mismatch(cand):
                    current = cand
                    progress = True
                    break
        return fx.creature_to_fixture(Creature(current, 1))
    return None
