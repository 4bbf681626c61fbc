from math import factorial

import pytest

from treetp.bijections import (
    BadPrecondition,
    Quintuple,
    fifthproof_count,
    fifthproof_join,
    fifthproof_split,
    model1_to_model2,
    model2_to_model1,
    pfd_to_tree,
    phi_k0,
    phi_k0_inverse,
    shift_k0_to_k1,
    shift_k1_to_k0,
    tree_to_pfd,
    verify_bijection,
)
from treetp.polyring import Polynomial, Y, phi, poly
from treetp.trees import PFD, RootedTree, enumerate_rooted_trees, tree_polynomial


def yphi_weight(t):
    """y^improper times prod over i != 1 of pdeg(i)! phi_pdeg(i), from the definition."""
    w = Polynomial.constant(1)
    pdeg = {v: 0 for v in range(1, t.n + 1)}
    for v in range(1, t.n + 1):
        if v == t.root:
            continue
        p = t.parent[v]
        if min(t.descendants(v) | {v}) < p:
            w = w * poly(Y)
        else:
            pdeg[p] += 1
    for v, d in pdeg.items():
        if v != 1:
            w = w * factorial(d) * poly(phi(d))
    return w


def test_shift_smallest_case():
    t = RootedTree.from_edges(2, 1, [(1, 2)])
    s, em = shift_k1_to_k0(t)
    assert s == RootedTree.from_edges(2, 2, [(2, 1)])
    assert shift_k0_to_k1(s) == t
    with pytest.raises(BadPrecondition):
        shift_k1_to_k0(s)


def test_shift_weighted_example():
    images = [shift_k1_to_k0(t)[0] for t in enumerate_rooted_trees(4, vertex1_children=1)]
    total = sum((yphi_weight(s) for s in images), Polynomial())
    assert total == tree_polynomial(3, 0, "yphi")
    assert total == poly(Y) * tree_polynomial(3, 1, "yphi")


@pytest.mark.parametrize("name", ["shift", "tree-pfd", "phi-k0"])
def test_exhaustive_bijections_hold(name):
    rep = verify_bijection(name, 6)
    assert rep.ok, rep.summary() + "\n" + "\n".join(rep.witnesses)


def test_tree_pfd_smallest_case():
    g, _ = tree_to_pfd(RootedTree.from_edges(2, 2, [(2, 1)]))
    assert g == PFD.from_text("1; 1>1")
    assert pfd_to_tree(g) == RootedTree.from_edges(2, 2, [(2, 1)])


def test_tree_pfd_worked_example():
    t = RootedTree.from_edges(13, 6, [(6, 3), (3, 8), (8, 9), (9, 5), (5, 1), (6, 11), (3, 13),
                                      (1, 10), (1, 12), (3, 2), (8, 7), (10, 4)])
    g, em = tree_to_pfd(t)
    assert g.to_text() == "12; 1>2 2>2 3>9 4>7 5>8 6>7 7>4 8>5 10>5 12>2"
    assert g.deg0 == 2
    assert pfd_to_tree(g) == t


def test_phi_k0_smallest_case():
    t = RootedTree.from_edges(2, 2, [(2, 1)])
    s, _ = phi_k0(t)
    assert s == t and phi_k0_inverse(s) == t


def test_sigma_identity_when_vertex_one_is_root():
    for t in enumerate_rooted_trees(5):
        if t.root == 1:
            s, _, _ = model2_to_model1(t)
            assert s == t


def test_sigma_round_trip_and_cardinality():
    rep = verify_bijection("sigma", 6)
    for check in ("roundtrip", "k-higher-children", "edge-bijection", "cardinality"):
        p, tot = rep.checks[check]
        assert p == tot, check


def test_sigma_edgewise_transport():
    # proper edges must land on regular edges and improper on irregular
    rep = verify_bijection("sigma", 6)
    assert rep.checks["edgewise"][0] == rep.checks["edgewise"][1], "\n".join(rep.witnesses)


def test_sigma_case_iiib_counterexample():
    t = RootedTree.from_text("5; 2; 5-1 1-3 2-4 2-5")
    s, em, case = model2_to_model1(t)
    assert s.to_text() == "5; 3; 5-1 1-2 1-4 3-5"
    assert model1_to_model2(s) == t


def test_sigma_frozen_tallies(frozen):
    assert verify_bijection("sigma", 6).checks == frozen["sigma_checks"]


def test_fifthproof_counting_example():
    assert fifthproof_count(4, 2) == (192, 192)
    for n in range(1, 9):
        for k in range(1, n + 1):
            lhs, rhs = fifthproof_count(n, k)
            assert lhs == rhs


def test_fifthproof_case_one_round_trip():
    # r1 < r2: T1 hangs below the root of T2
    q = Quintuple.make({1}, 1, {}, 3, {2: 3})
    t, star = fifthproof_join(q, 3)
    assert (t.root, star) == (3, 1)
    assert fifthproof_split(t, star) == q


def test_fifthproof_minimal_collision():
    q1 = Quintuple.make({2, 3}, 3, {2: 3}, 1, {4: 1})
    q2 = Quintuple.make({3}, 3, {}, 1, {2: 1, 4: 1})
    j1, j2 = fifthproof_join(q1, 4), fifthproof_join(q2, 4)
    assert j1 == j2
    assert j1[0].to_text() == "4; 3; 3-1 1-2 1-4" and j1[1] == 1


def test_fifthproof_round_trip():
    rep = verify_bijection("fifthproof", 6)
    bad = rep.failed_checks()
    assert not bad, rep.summary() + "\n" + "\n".join(rep.witnesses)


def test_fifthproof_frozen_tallies(frozen):
    assert verify_bijection("fifthproof", 5).checks == frozen["fifthproof_checks"]


def test_unknown_bijection_name():
    with pytest.raises(ValueError):
        verify_bijection("nope", 4)
