import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import primefactors

from conftest import group
from quasirandom.errors import CapExceededError, InputError
from quasirandom.groups import make_group, subgroup_closure
from quasirandom.productfree import (
    coset_product_free,
    erdos_sum_free,
    is_product_free,
    is_sum_free,
    max_product_free_exact,
    standard_rep_trace,
    thm_4_6_construct,
)
from quasirandom.setfun import Subset


def product_free_oracle(G, S):
    return not any(G.mult(x, y) in S for x in S for y in S)


def exhaustive_max(G):
    """Plain include/exclude enumeration, pruned only by size + remaining <= best."""
    n = G.order
    best = 0

    def rec(i, chosen):
        nonlocal best
        best = max(best, len(chosen))
        if i == n or len(chosen) + (n - i) <= best:
            return
        S = chosen | {i}
        if product_free_oracle(G, S):
            rec(i + 1, S)
        rec(i + 1, chosen)

    rec(0, frozenset())
    return best


def cyclic_max_formula(n):
    """Largest sum-free subset of Z_n, from its prime factorisation."""
    ps = [p for p in primefactors(n) if p % 3 == 2]
    if ps:
        return (n + n // min(ps)) // 3
    return n // 3


@pytest.mark.parametrize("n", range(1, 25))
def test_exact_cyclic_matches_oracles(n):
    G = group(f"cyclic:{n}")
    res = max_product_free_exact(G)
    assert res.verified and res.certificate["optimal"]
    assert product_free_oracle(G, set(res.elements))
    assert res.size == exhaustive_max(G) == cyclic_max_formula(n)


@pytest.mark.parametrize("descriptor", ["sym:3", "dihedral:4", "dihedral:5", "alt:4", "dihedral:6", "cyclic:2*cyclic:2", "cyclic:3*sym:3"])
def test_exact_nonabelian_matches_oracle(descriptor):
    G = group(descriptor)
    res = max_product_free_exact(G)
    assert res.size == exhaustive_max(G)
    assert product_free_oracle(G, set(res.elements))


def test_exact_cap():
    with pytest.raises(CapExceededError):
        max_product_free_exact(group("cyclic:29"))
    assert max_product_free_exact(group("sym:4"), cap=24).verified


@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_is_product_free_matches_oracle(n, seed):
    G = group(f"dihedral:{max(n, 3)}")
    rng = np.random.default_rng(seed)
    S = Subset.random(G.order, rng.uniform(0, 0.6), rng)
    assert is_product_free(G, S) == product_free_oracle(G, set(S.indices.tolist()))


def test_sum_free():
    assert is_sum_free([])
    assert is_sum_free([2, 3])
    assert not is_sum_free([1, 2])
    assert not is_sum_free([2, 4])
    assert is_sum_free([-3, 1, 5])


def test_erdos_example():
    Y = erdos_sum_free([1, 2, 3])
    assert len(Y) >= 1 and is_sum_free(Y) and set(Y) <= {1, 2, 3}
    with pytest.raises(InputError):
        erdos_sum_free([0, 1])
    with pytest.raises(InputError):
        erdos_sum_free([])


@given(st.lists(st.integers(-1000, 1000).filter(bool), min_size=1, max_size=50, unique=True))
def test_erdos_random(X):
    Y = erdos_sum_free(X)
    assert set(Y) <= set(X)
    assert is_sum_free(Y)
    assert len(Y) >= math.ceil(len(X) / 3)


def test_coset_examples():
    G = group("psl2:5")
    # a single nontrivial element generates a proper cyclic subgroup
    res = coset_product_free(G, [1])
    H = subgroup_closure(G, [1])
    assert res.size == H.cardinality and res.verified
    assert product_free_oracle(G, set(res.elements))
    assert G.identity not in res.elements
    with pytest.raises(InputError):
        # the closure of every element is the whole group
        coset_product_free(G, range(60))


@pytest.mark.parametrize("descriptor", ["sym:4", "alt:5", "dihedral:9", "cyclic:12", "psl2:7"])
def test_every_coset_construction_verifies(descriptor):
    G = group(descriptor)
    rng = np.random.default_rng(0)
    for _ in range(10):
        gens = rng.choice(G.order, size=int(rng.integers(1, 3)), replace=False).tolist()
        try:
            res = coset_product_free(G, gens)
        except InputError:
            continue
        assert res.verified and product_free_oracle(G, set(res.elements))


def test_standard_rep_trace():
    perms = np.array([[0, 1, 2, 3], [1, 0, 2, 3], [1, 2, 3, 0]])
    assert standard_rep_trace(perms).tolist() == [3, 1, -1]


@pytest.mark.parametrize("descriptor", ["alt:5", "sym:5", "sym:6", "alt:6"])
def test_rep_construction(descriptor):
    G = group(descriptor)
    res = thm_4_6_construct(G)
    if res.size:
        assert res.verified
        assert product_free_oracle(G, set(res.elements))
    k = G.permutations.shape[1] - 1
    X = np.flatnonzero(standard_rep_trace(G.permutations) <= k / 2)
    assert res.details["X_size"] == X.size
    assert set(res.elements) <= set(X.tolist())


def test_rep_construction_sizes():
    assert thm_4_6_construct(group("alt:5")).size == 3
    res = thm_4_6_construct(group("sym:6"))
    assert res.details["X_size"] >= group("sym:6").order / 3
    assert res.size == 23


def test_rep_construction_rejects():
    with pytest.raises(InputError):
        thm_4_6_construct(group("psl2:5"))
    with pytest.raises(InputError):
        thm_4_6_construct(group("sym:4"), delta=0.2)


def test_search_result_json():
    res = max_product_free_exact(group("cyclic:5"))
    d = res.to_dict()
    assert d["method"] == "exact" and d["size"] == 2 and d["certificate"]["upper_bound"] == 2
