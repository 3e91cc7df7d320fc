"""Deliberately naive reference implementation of the game norm.

Quantifies over every forbidden-value set a inside [0, n3[i]) and every
ordered branch tuple, with no trace or value reduction.  Exponential; guarded
by a work budget (CREATURE_LAB_BUDGET, default 10^8 elementary steps).
"""

from __future__ import annotations

import itertools
import math
import os

from .creature import SimpleCreature, validate_creature
from .errors import BudgetError, ValidationError
from .params import GrowthSequences
from .tree_model import AmbientTree

DEFAULT_BUDGET = 10**8


def work_budget() -> int:
    raw = os.environ.get("CREATURE_LAB_BUDGET", "")
    try:
        return int(raw) if raw else DEFAULT_BUDGET
    except ValueError:
        return DEFAULT_BUDGET


def _instance_cost(branch_count: int, n3: int, k: int, val_size: int) -> int:
    a_count = sum(math.comb(n3, j) for j in range(k + 1))
    return max(branch_count, 1) ** k * a_count * val_size


def oracle_norm0(
    c: SimpleCreature,
    tree: AmbientTree,
    params: GrowthSequences,
    budget: int | None = None,
    validate: bool = True,
) -> int:
    """Reference norm0: full quantification, same n1[i] cap convention."""
    if validate:
        rep = validate_creature(c, params, tree)
        if not rep.ok:
            raise ValidationError(f"oracle_norm0 of invalid creature: {rep.failures()[0].clause}")
    if budget is None:
        budget = work_budget()
    i = c.i
    n1i, n2i, n3i = params.n1[i], params.n2[i], params.n3[i]
    cap = n1i
    base_dom = c.base.domset()
    branches = [frozenset(b) for b in tree.branches()]
    universe = list(range(n3i))

    def feasible(k: int) -> bool:
        cost = _instance_cost(len(branches), n3i, k, len(c.valrange))
        if cost > budget:
            raise BudgetError(
                f"oracle instance too large at k={k}: {cost} > budget {budget}"
            )
        tuples = itertools.product(branches, repeat=k) if branches else ([],) if k == 0 else []
        for combo in tuples:
            union = frozenset().union(*combo) if combo else frozenset()
            for a_size in range(k + 1):
                for a_tuple in itertools.combinations(universe, a_size):
                    a = set(a_tuple)
                    found = False
                    for eta in c.valrange:
                        if (len(eta) << k) > n2i:
                            continue
                        if all(
                            v not in a
                            for x, v in eta.pairs
                            if x in union and x not in base_dom
                        ):
                            found = True
                            break
                    if not found:
                        return False
        return True

    if not branches:
        return cap
    best = 0
    for k in range(1, cap + 1):
        if not feasible(k):
            return best
        best = k
    return best
