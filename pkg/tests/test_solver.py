import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import group, random_subset
from quasirandom.errors import InadmissibleWordError, InputError
from quasirandom.groups import make_group
from quasirandom.setfun import Subset
from quasirandom.solver import (
    ConstraintSystem,
    _Search,
    check_density_condition,
    check_density_condition_m3,
    evaluate_word,
    format_word,
    pairwise_threshold,
    parse_word,
    solve,
    solve_pairwise,
    system_from_json,
    system_to_json,
)


def brute_force(sys):
    """Every witness of a system, by enumerating all m-tuples."""
    G, m = sys.group, sys.m
    out = []
    for xs in itertools.product(range(G.order), repeat=m):
        vals = {i + 1: x for i, x in enumerate(xs)}
        if all(c.subset.mask[int(evaluate_word(G, c.word, vals))] for c in sys.constraints):
            out.append(list(xs))
    return out


def satisfies(sys, witness):
    vals = {i + 1: x for i, x in enumerate(witness)}
    return all(c.subset.mask[int(evaluate_word(sys.group, c.word, vals))] for c in sys.constraints)


def test_word_parsing():
    assert parse_word(["x2", "x3^-1", "x1"]) == ((2, 1), (3, -1), (1, 1))
    assert format_word(((2, 1), (3, -1))) == ["x2", "x3^-1"]
    for bad in (["y1"], ["x1^2"], []):
        with pytest.raises(InputError):
            parse_word(bad)


def test_all_full_solves():
    G = group("psl2:5")
    out = solve(ConstraintSystem.forward_products(G, 3, {}), seed=1)
    assert out.solved and satisfies(ConstraintSystem.forward_products(G, 3, {}), out.witness)
    assert solve_pairwise(G, {}, m=4).solved


def test_forced_cyclic_example():
    G = group("cyclic:5")
    sets = {(1,): Subset.from_indices(5, [1]), (2,): Subset.from_indices(5, [2]), (1, 2): Subset.from_indices(5, [3])}
    out = solve(ConstraintSystem.forward_products(G, 2, sets))
    assert out.witness == [1, 2]
    assert out.status == "density-warning-solved"


def test_psl2_13_dense_example():
    G = group("psl2:13")
    rng = np.random.default_rng(42)
    sets = {F: Subset.random(G.order, 0.9, rng) for r in (1, 2, 3) for F in itertools.combinations((1, 2, 3), r)}
    sys = ConstraintSystem.forward_products(G, 3, sets)
    out = solve(sys, seed=42)
    assert out.solved and satisfies(sys, out.witness)
    # k = 6 is far below the 2^9 needed, so no guarantee is claimed
    assert solve(sys, seed=42, k=6).status == "density-warning-solved"


def test_dihedral_pairs_against_oracle():
    G = group("dihedral:6")
    rng = np.random.default_rng(5)
    solved = 0
    for _ in range(20):
        sets = {(i, j): random_subset(G, rng, 0.3) for i, j in itertools.combinations((1, 2, 3), 2)}
        sys = ConstraintSystem.pairs(G, 3, sets)
        truth = brute_force(sys)
        out = solve(sys, seed=int(rng.integers(1 << 30)))
        if out.solved:
            assert out.witness in truth
            solved += 1
        else:
            # below the thresholds the search is best effort, so only soundness is asserted
            assert out.status == "density-warning-exhausted"
    assert solved > 0


def test_pairs_inverse_against_oracle():
    G = group("sym:3")
    rng = np.random.default_rng(9)
    for _ in range(10):
        sets = {(i, j): random_subset(G, rng, 0.5) for i, j in itertools.combinations((1, 2, 3), 2)}
        sys = ConstraintSystem.pairs(G, 3, sets, inverse=True)
        out = solve(sys, seed=3)
        if out.solved:
            assert out.witness in brute_force(sys)


def test_m2_is_complete(rng):
    """Two variables are scanned exhaustively, so the solver finds a witness iff one exists."""
    for descriptor in ["cyclic:12", "dihedral:5", "alt:4"]:
        G = group(descriptor)
        for _ in range(15):
            sets = {F: random_subset(G, rng, rng.uniform(0.02, 0.3)) for F in [(1,), (2,), (1, 2)]}
            sys = ConstraintSystem.forward_products(G, 2, sets)
            truth = brute_force(sys)
            out = solve(sys, seed=int(rng.integers(1 << 30)))
            assert out.solved == bool(truth)
            if out.solved:
                assert out.witness in truth


def test_density_condition_examples():
    G = group("psl2:13")
    sys = ConstraintSystem.forward_products(G, 3, {})
    rep = check_density_condition(sys, 512)
    assert rep.passed and rep.threshold == 1.0 and rep.worst_margin == 1.0
    rep = check_density_condition(sys, 6)
    # every (h, E): h=1 with E in {2},{3},{2,3}; h=2 with E={3}
    assert not rep.passed and len(rep.failures) == 4
    rep3 = check_density_condition_m3(sys, 16)
    assert rep3.passed and rep3.threshold == 1.0
    assert not check_density_condition_m3(sys, 15).passed
    with pytest.raises(InputError):
        check_density_condition(ConstraintSystem.pairs(G, 3, {}), 512)
    with pytest.raises(InputError):
        check_density_condition_m3(ConstraintSystem.forward_products(G, 2, {}), 512)


def test_density_condition_products():
    """m = 2: the single check is p1 p2 p12 >= 64/k."""
    G = group("cyclic:10")
    half = Subset.from_indices(10, range(5))
    sys = ConstraintSystem.forward_products(G, 2, {(1,): half, (2,): half, (1, 2): half})
    rep = check_density_condition(sys, 512)
    assert rep.worst_margin == pytest.approx(0.125 / (64 / 512))
    assert rep.passed
    assert not check_density_condition(sys, 511).passed


def test_pairwise_threshold():
    assert pairwise_threshold(3, 6) == pytest.approx(4 * 6 ** (-1 / 3))
    assert pairwise_threshold(3, 6) == pytest.approx(2.20, abs=5e-3)
    out = solve_pairwise(group("psl2:13"), {}, m=3, k=6)
    assert out.solved and out.guaranteed is False
    assert out.condition["threshold"] == pytest.approx(2.2013, abs=1e-3)


def test_guarantee_on_large_psl2():
    """psl2:131 has k = 65 >= 64/p^3 for p = 0.996, so the condition holds at m = 2."""
    G = make_group("psl2:131")
    rng = np.random.default_rng(0)
    sets = {F: Subset.random(G.order, 0.996, rng) for F in [(1,), (2,), (1, 2)]}
    sys = ConstraintSystem.forward_products(G, 2, sets)
    assert check_density_condition(sys, 65).passed
    out = solve(sys, seed=0, k=65)
    assert out.status == "solved" and out.guaranteed
    assert satisfies(sys, out.witness)


def test_residual_sets_match_brute_force(rng):
    """Fixing x1 = g turns A_F and A_{1F} into A_F ∩ g^-1 A_{1F}."""
    for descriptor in ["psl2:5", "dihedral:7", "sym:4"]:
        G = group(descriptor)
        sets = {F: random_subset(G, rng, 0.6) for r in (1, 2, 3) for F in itertools.combinations((1, 2, 3), r)}
        sys = ConstraintSystem.forward_products(G, 3, sets)
        cons = [(c.word, c.subset.mask, c.subset.density) for c in sys.constraints]
        search = _Search(G, 3, np.random.default_rng(0), 2)
        for g in rng.integers(0, G.order, size=5):
            g = int(g)
            ok, merged = search._reduce([c for c in cons if c[0] != ((1, 1),)], 1, g)
            assert ok
            for F in [(2,), (3,), (2, 3)]:
                word = tuple((i, 1) for i in F)
                expect = [x for x in range(G.order) if x in sets[F] and G.mult(g, x) in sets[(1,) + F]]
                assert np.flatnonzero(merged[word][0]).tolist() == expect
                assert merged[word][1] == pytest.approx(sets[F].density * sets[(1,) + F].density)


def test_custom_shape_against_oracle():
    """x1x2 in A12, x3x1 in A13, x2x3^-1 in A23, x2x3^-1x1^-1 in A123."""
    G = group("sym:3")
    rng = np.random.default_rng(11)
    found = 0
    for _ in range(10):
        words = [(w, random_subset(G, rng, 0.6)) for w in (["x1", "x2"], ["x3", "x1"], ["x2", "x3^-1"], ["x2", "x3^-1", "x1^-1"])]
        sys = ConstraintSystem.custom(G, 3, words)
        truth = brute_force(sys)
        out = solve(sys, seed=1)
        assert out.status.startswith("density-warning-")
        if out.solved:
            assert out.witness in truth
            found += 1
    assert found > 0


def test_inadmissible_word():
    G = group("sym:3")
    with pytest.raises(InadmissibleWordError):
        ConstraintSystem.custom(G, 2, [(["x2", "x1", "x2"], Subset.full(6))])
    with pytest.raises(InadmissibleWordError):
        ConstraintSystem.custom(G, 3, [(["x2", "x1", "x3"], Subset.full(6))])
    with pytest.raises(InputError):
        ConstraintSystem.custom(G, 2, [(["x3"], Subset.full(6))])
    with pytest.raises(InputError):
        ConstraintSystem.forward_products(G, 1, {})


def test_empty_set_exhausts_immediately():
    G = group("cyclic:7")
    out = solve(ConstraintSystem.forward_products(G, 2, {(2,): Subset.empty(7)}))
    assert out.status == "density-warning-exhausted" and out.witness is None and out.trace == []


@given(st.integers(0, 2**32 - 1))
def test_deterministic(seed):
    G = group("psl2:5")
    rng = np.random.default_rng(seed)
    sets = {F: random_subset(G, rng, 0.7) for r in (1, 2, 3) for F in itertools.combinations((1, 2, 3), r)}
    sys = ConstraintSystem.forward_products(G, 3, sets)
    a, b = solve(sys, seed=seed), solve(sys, seed=seed)
    assert a.to_json() == b.to_json()
    if a.solved:
        assert satisfies(sys, a.witness)


def test_rejects_negative_depth():
    with pytest.raises(InputError):
        solve(ConstraintSystem.forward_products(group("cyclic:3"), 2, {}), backtrack_depth=-1)


@pytest.mark.parametrize("pattern", ["forward-products", "pairs", "pairs-inverse", "custom-words"])
def test_json_roundtrip(pattern, rng):
    G = group("alt:4")
    if pattern == "forward-products":
        sys = ConstraintSystem.forward_products(G, 3, {(1, 3): random_subset(G, rng)})
    elif pattern == "custom-words":
        sys = ConstraintSystem.custom(G, 3, [(["x1", "x2"], random_subset(G, rng)), (["x2", "x3^-1"], random_subset(G, rng))])
    else:
        sys = ConstraintSystem.pairs(G, 3, {(1, 2): random_subset(G, rng)}, inverse=pattern == "pairs-inverse")
    back = system_from_json(system_to_json(sys))
    assert back.pattern == sys.pattern and back.m == sys.m
    assert [(c.word, c.subset) for c in back.constraints] == [(c.word, c.subset) for c in sys.constraints]


def test_json_input_format():
    text = json.dumps({"group": "cyclic:5", "m": 2, "pattern": "forward-products", "sets": {"1": [1], "2": [2], "1,2": [3]}})
    assert solve(system_from_json(text)).witness == [1, 2]
    with pytest.raises(InputError):
        system_from_json('{"group": "cyclic:5"}')
    with pytest.raises(InputError):
        system_from_json(json.dumps({"group": "cyclic:5", "m": 2, "pattern": "custom-words", "sets": {"a": [1]}}))
