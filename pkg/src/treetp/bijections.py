"""Executable bijections between tree and digraph models, with edge maps."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .trees import (
    PFD,
    RootedTree,
    UncoveredCase,
    _tree_stats,
    classify_edge_model1,
    edge_classify_pfd,
    edge_classify_tree,
    enumerate_rooted_trees,
)

__all__ = [
    "EdgeMap",
    "BadPrecondition",
    "relabel_map",
    "shift_k1_to_k0",
    "shift_k0_to_k1",
    "tree_to_pfd",
    "pfd_to_tree",
    "phi_k0",
    "phi_k0_inverse",
    "model2_to_model1",
    "model1_to_model2",
    "Quintuple",
    "fifthproof_split",
    "fifthproof_join",
    "BIJECTIONS",
    "BijectionReport",
    "verify_bijection",
    "fifthproof_count",
]


class BadPrecondition(ValueError):
    pass


@dataclass
class EdgeMap:
    """Source edge -> image edge; ``dropped`` lists source edges with no image."""

    pairs: dict = field(default_factory=dict)
    dropped: tuple = ()

    def __getitem__(self, e):
        return self.pairs[e]

    def is_bijective_onto(self, source_edges, image_edges) -> bool:
        src = set(source_edges) - set(self.dropped)
        return set(self.pairs) == src and sorted(self.pairs.values()) == sorted(image_edges)


def relabel_map(vertices, add: int, remove: int) -> dict:
    """Order isomorphism from ``vertices`` onto vertices + {add} - {remove}."""
    old = sorted(vertices)
    if remove not in old or add in old:
        raise BadPrecondition("relabel needs remove in the set and add outside it")
    new = sorted(set(old) - {remove} | {add})
    return dict(zip(old, new))


# small helpers over (root, parent dict) pieces

def _children(parent: dict) -> dict:
    ch: dict = {}
    for c, p in parent.items():
        ch.setdefault(p, []).append(c)
    for v in ch.values():
        v.sort()
    return ch


def _parent_dict(t: RootedTree) -> dict:
    return {v: t.parent[v] for v in range(1, t.n + 1) if v != t.root}


def _tree(n: int, root: int, parent: dict) -> RootedTree:
    return RootedTree.from_parent_map(n, root, parent)


def _subtree(ch: dict, v: int) -> set:
    out, stack = set(), [v]
    while stack:
        u = stack.pop()
        out.add(u)
        stack.extend(ch.get(u, ()))
    return out


def _increasing_part(ch: dict, v: int) -> set:
    out, stack = set(), [v]
    while stack:
        u = stack.pop()
        out.add(u)
        stack.extend(c for c in ch.get(u, ()) if c > u)
    return out


def _top_ancestor(parent: dict, root: int, v: int) -> int:
    while parent[v] != root:
        v = parent[v]
    return v


# Vertex 1 with one child versus vertex 1 a leaf

def shift_k1_to_k0(t: RootedTree) -> tuple[RootedTree, EdgeMap]:
    """Cut 1-a for the only child a of 1, root at a and hang the old root below a."""
    kids = t.children(1)
    if len(kids) != 1:
        raise BadPrecondition("vertex 1 must have exactly one child")
    a, r = kids[0], t.root
    parent = _parent_dict(t)
    del parent[a]
    parent[r] = a
    em = EdgeMap({e: e for e in t.edges() if e != (1, a)})
    em.pairs[(1, a)] = (a, r)
    return _tree(t.n, a, parent), em


def shift_k0_to_k1(t: RootedTree) -> RootedTree:
    if t.children(1):
        raise BadPrecondition("vertex 1 must be a leaf")
    a = t.root
    if a == 1:
        raise BadPrecondition("vertex 1 must not be the root")
    parent = _parent_dict(t)
    r = next(c for c in t.children(a) if t.is_ancestor(c, 1))
    del parent[r]
    parent[a] = 1
    return _tree(t.n, r, parent)


# Trees on [n+1] versus partial functional digraphs on [n]

def tree_to_pfd(t: RootedTree) -> tuple[PFD, EdgeMap]:
    """Backbone root..1 read as a permutation; other edges point to parents.

    Edges out of vertex 1 have no image; they account for the k vertices of
    out-degree 0.
    """
    backbone = t.path_from_root(1)
    srt = sorted(backbone)
    sigma = dict(zip(srt, backbone))
    out = {}
    em = EdgeMap()
    for p, c in t.edges():
        if c in sigma:
            continue
        if p == 1:
            continue
        out[c] = p
        em.pairs[(p, c)] = (c - 1, p - 1)
    em.dropped = tuple((1, c) for c in t.children(1))
    if len(backbone) > 1:
        inv = {v: k for k, v in sigma.items()}
        for i in srt:
            if i == 1:
                continue
            head = sigma[i]
            if head == 1:
                head = sigma[1]
            out[i] = head
        # backbone edge with parent v maps to the cyclic edge into v
        for a, b in zip(backbone, backbone[1:]):
            tail = inv[a] if a != backbone[0] else srt[-1]
            em.pairs[(a, b)] = (tail - 1, a - 1)
    n = t.n - 1
    table = [0] * (n + 1)
    for a, b in out.items():
        table[a - 1] = b - 1
    return PFD(n, tuple(table)), em


def pfd_to_tree(g: PFD) -> RootedTree:
    n1 = g.n + 1
    out = {a + 1: b + 1 for a, b in g.edges()}
    cyc = {v + 1 for v in g.cyclic_vertices()}
    parent = {}
    for a, b in out.items():
        if a not in cyc:
            parent[a] = b
    for v in range(2, n1 + 1):
        if v not in out:
            parent[v] = 1
    if not cyc:
        return _tree(n1, 1, parent)
    m = max(cyc)
    sigma = {a: out[a] for a in cyc}
    sigma[1] = sigma[m]
    sigma[m] = 1
    srt = sorted(sigma)
    backbone = [sigma[v] for v in srt]
    for a, b in zip(backbone, backbone[1:]):
        parent[b] = a
    return _tree(n1, backbone[0], parent)


# Model 2 (vertex 1 has k children) versus Model 1 (root has k higher children)

def _phi_parts(root: int, parent: dict):
    """phi on a piece whose vertex 1 is a leaf and root != 1.

    Returns (new root, new parent dict, edge map).
    """
    ch = _children(parent)
    tmax = _increasing_part(ch, root)
    if 1 in tmax:
        raise BadPrecondition("vertex 1 inside the increasing subtree at the root")
    ri = 1
    while ri not in tmax:
        ri = parent[ri]
    rel = relabel_map(tmax, 1, ri)
    new = {}
    pairs = {}
    for c, p in parent.items():
        if p in tmax and c in tmax:
            new[rel[c]] = rel[p]
            pairs[(p, c)] = (rel[p], rel[c])
        else:
            new[c] = p
            pairs[(p, c)] = (p, c)
    return ri, new, pairs


def _phi_inverse_parts(root: int, parent: dict):
    ch = _children(parent)
    m = _increasing_part(ch, 1)
    rel = relabel_map(m, root, 1)
    new = {}
    for c, p in parent.items():
        if p in m and c in m:
            new[rel[c]] = rel[p]
        else:
            new[c] = p
    return rel[1], new


def phi_k0(t: RootedTree) -> tuple[RootedTree, EdgeMap]:
    if t.children(1):
        raise BadPrecondition("vertex 1 must be a leaf")
    if t.root == 1:
        return t, EdgeMap({e: e for e in t.edges()})
    root, parent, pairs = _phi_parts(t.root, _parent_dict(t))
    return _tree(t.n, root, parent), EdgeMap(pairs)


def phi_k0_inverse(t: RootedTree) -> RootedTree:
    if t.root == 1:
        return t
    if any(c > t.root for c in t.children(t.root)):
        raise BadPrecondition("root must have no higher children")
    root, parent = _phi_inverse_parts(t.root, _parent_dict(t))
    return _tree(t.n, root, parent)


def model2_to_model1(t: RootedTree) -> tuple[RootedTree, EdgeMap, str]:
    """sigma and psi; also returns the name of the case used."""
    r = t.root
    vs = t.children(1)
    k = len(vs)
    if r == 1:
        return t, EdgeMap({e: e for e in t.edges()}), "root"
    if k == 0:
        img, em = phi_k0(t)
        return img, em, "k0"
    parent = _parent_dict(t)
    ch = _children(parent)
    v1 = vs[0]
    pairs = {}
    if v1 < r:
        high = [h for h in ch.get(v1, ()) if h > v1]
        new = dict(parent)
        for v in vs:
            del new[v]
        for h in high:
            new[h] = 1
        new[r] = v1
        for v in vs[1:]:
            new[v] = v1
        for e in t.edges():
            pairs[e] = e
        pairs[(1, v1)] = (v1, r)
        for v in vs[1:]:
            pairs[(1, v)] = (v1, v)
        for h in high:
            pairs[(v1, h)] = (1, h)
        return _tree(t.n, v1, new), EdgeMap(pairs), "I"
    top = _top_ancestor(parent, r, 1)
    if top < r:
        high = [h for h in ch.get(r, ()) if h > r]
        new = dict(parent)
        for h in high:
            new[h] = 1
        for v in vs:
            new[v] = r
        for e in t.edges():
            pairs[e] = e
        for v in vs:
            pairs[(1, v)] = (r, v)
        for h in high:
            pairs[(r, h)] = (1, h)
        return _tree(t.n, r, new), EdgeMap(pairs), "II"
    # Case III: the top ancestor of 1 is above the root
    below_v = set()
    for v in vs:
        below_v |= _subtree(ch, v)
    t0 = {c: p for c, p in parent.items() if c not in below_v}
    u, phi0, phi_pairs = _phi_parts(r, t0)
    if u < v1:
        new = dict(phi0)
        for c, p in parent.items():
            if c in below_v:
                new[c] = p
        for v in vs:
            new[v] = u
        pairs.update(phi_pairs)
        for c, p in parent.items():
            if c in below_v and c not in vs:
                pairs[(p, c)] = (p, c)
        for v in vs:
            pairs[(1, v)] = (u, v)
        return _tree(t.n, u, new), EdgeMap(pairs), "IIIa"
    # Case III(b): u > v1. Relabel the increasing part of the subtree at v1
    # onto (that set + u - v1); its root, the smallest label, hangs from v1.
    t1_vertices = _subtree(ch, v1)
    m1 = _increasing_part(ch, v1)
    rel = relabel_map(m1, u, v1)
    top_r = rel[v1]
    new = dict(phi0)
    pairs.update(phi_pairs)
    for c, p in parent.items():
        if c == v1:
            continue
        if c in t1_vertices and p in m1 and c in m1:
            new[rel[c]] = rel[p]
            pairs[(p, c)] = (rel[p], rel[c])
        elif c in below_v:
            new[c] = p
            pairs[(p, c)] = (p, c)
    new[top_r] = v1
    pairs[(1, v1)] = (v1, top_r)
    for v in vs[1:]:
        new[v] = v1
        pairs[(1, v)] = (v1, v)
    return _tree(t.n, v1, new), EdgeMap(pairs), "IIIb"


def model1_to_model2(t: RootedTree) -> RootedTree:
    rho = t.root
    higher = [c for c in t.children(rho) if c > rho]
    if rho == 1:
        return t
    if not higher:
        return phi_k0_inverse(t)
    parent = _parent_dict(t)
    ch = _children(parent)
    a1 = all(c > rho for c in ch.get(1, ()))
    top = _top_ancestor(parent, rho, 1)
    b1 = top > rho
    if a1 and b1:
        # Case I reversed: the root is v1, the top ancestor of 1 is r
        v1, r = rho, top
        new = dict(parent)
        for c in higher:
            del new[c]
        for h in ch.get(1, ()):
            new[h] = v1
        new[v1] = 1
        for v in higher:
            if v != r:
                new[v] = 1
        return _tree(t.n, r, new)
    if a1 and not b1:
        new = dict(parent)
        for h in ch.get(1, ()):
            new[h] = rho
        for v in higher:
            new[v] = 1
        return _tree(t.n, rho, new)
    if not a1 and not b1:
        below_v = set()
        for v in higher:
            below_v |= _subtree(ch, v)
        phi0 = {c: p for c, p in parent.items() if c not in below_v}
        r, t0 = _phi_inverse_parts(rho, phi0)
        new = dict(t0)
        for c, p in parent.items():
            if c in below_v:
                new[c] = p
        for v in higher:
            new[v] = 1
        return _tree(t.n, r, new)
    # Case III(b) reversed
    v1, w = rho, top
    rset = _increasing_part(ch, w)
    u = 1
    while u not in rset:
        u = parent[u]
    hang_u = {u}
    stack = [c for c in ch.get(u, ()) if c not in rset]
    while stack:
        x = stack.pop()
        hang_u.add(x)
        stack.extend(ch.get(x, ()))
    phi0 = {c: parent[c] for c in hang_u if c != u}
    r, t0 = _phi_inverse_parts(u, phi0)
    rel = relabel_map(rset, v1, u)
    new = dict(t0)
    others = [v for v in higher if v != w]
    sub_others = set()
    for v in others:
        sub_others |= _subtree(ch, v)
    for c, p in parent.items():
        if (c in hang_u and c != u) or c in sub_others or c == w:
            continue
        if p in rset and c in rset:
            new[rel[c]] = rel[p]
        else:
            new[c] = p
    for c in sub_others:
        if c not in others:
            new[c] = parent[c]
    new[v1] = 1
    for v in others:
        new[v] = 1
    return _tree(t.n, r, new)


# Marked triplets versus quintuples (root with k lower children)

@dataclass(frozen=True)
class Quintuple:
    """A subset A of [n], a rooted tree on A and a rooted tree on the rest."""

    A: frozenset
    t1_root: int
    t1_parent: tuple  # sorted (child, parent) pairs
    t2_root: int
    t2_parent: tuple

    @classmethod
    def make(cls, a, r1, p1: dict, r2, p2: dict) -> "Quintuple":
        return cls(frozenset(a), r1, tuple(sorted(p1.items())), r2, tuple(sorted(p2.items())))


def _lower_children(ch: dict, v: int) -> list:
    return [c for c in ch.get(v, ()) if c < v]


def fifthproof_join(q: Quintuple, n1: int) -> tuple[RootedTree, int]:
    """Quintuple -> (T, v_star): attach T1 below T2 (r1 < r2) or swap lower children (r1 > r2)."""
    p1, p2 = dict(q.t1_parent), dict(q.t2_parent)
    r1, r2 = q.t1_root, q.t2_root
    if n1 in q.A:
        raise BadPrecondition("A must avoid the largest vertex")
    if r1 < r2:
        parent = {**p1, **p2, r1: r2}
        return _tree(n1, r2, parent), r1
    ch1, ch2 = _children(p1), _children(p2)
    low1, low2 = _lower_children(ch1, r1), _lower_children(ch2, r2)
    parent = {**p1, **p2, r2: r1}
    for c in low1:
        parent[c] = r2
    for c in low2:
        parent[c] = r1
    t = _tree(n1, r1, parent)
    star = _top_ancestor(parent, r1, n1) if n1 != r1 else None
    if star is None or star > r1:
        raise UncoveredCase(f"largest vertex not under a lower child of the root: {t}")
    return t, star


def fifthproof_split(t: RootedTree, star: int) -> Quintuple:
    """(T, v_star) -> quintuple; inverse of fifthproof_join where that map is injective."""
    r = t.root
    n1 = t.n
    if t.parent[star] != r or star > r:
        raise BadPrecondition("v_star must be a lower child of the root")
    parent = _parent_dict(t)
    ch = _children(parent)
    if not t.is_ancestor(star, n1):
        a = _subtree(ch, star)
        p1 = {c: p for c, p in parent.items() if c in a and c != star}
        p2 = {c: p for c, p in parent.items() if c not in a}
        return Quintuple.make(a, star, p1, r, p2)
    low = _lower_children(ch, r)
    vb = max(low)
    new = dict(parent)
    del new[vb]
    low_r = [c for c in low if c != vb]
    low_vb = _lower_children(ch, vb)
    for c in low_r:
        new[c] = vb
    for c in low_vb:
        new[c] = r
    nch = _children(new)
    a = _subtree(nch, r)
    p1 = {c: p for c, p in new.items() if c in a}
    p2 = {c: p for c, p in new.items() if c not in a}
    return Quintuple.make(a, r, p1, vb, p2)


# exhaustive verification

BIJECTIONS = ("shift", "tree-pfd", "phi-k0", "sigma", "fifthproof")


@dataclass
class BijectionReport:
    name: str
    max_vertices: int
    checks: dict = field(default_factory=dict)  # check name -> [passed, total]
    witnesses: list = field(default_factory=list)
    max_witnesses: int = 5

    def tally(self, check: str, ok: bool, witness=None):
        c = self.checks.setdefault(check, [0, 0])
        c[1] += 1
        if ok:
            c[0] += 1
        elif len(self.witnesses) < self.max_witnesses:
            self.witnesses.append(f"{check}: {witness}")

    @property
    def ok(self) -> bool:
        return all(p == t for p, t in self.checks.values())

    def failed_checks(self) -> list:
        return [k for k, (p, t) in self.checks.items() if p != t]

    def summary(self) -> str:
        parts = [f"{k} {p}/{t}" for k, (p, t) in self.checks.items()]
        return f"{self.name} n+1<={self.max_vertices}: " + ", ".join(parts)


def _model1_label(label: str) -> str:
    return "regular" if label == "proper" else "irregular"


def _edgewise(em: EdgeMap, src: dict, img: dict, translate) -> bool:
    return all(img[f] == translate(src[e]) for e, f in em.pairs.items())


def _check_shift(rep: BijectionReport, n1: int):
    images = set()
    for t in enumerate_rooted_trees(n1, vertex1_children=1):
        s, em = shift_k1_to_k0(t)
        images.add(s)
        rep.tally("roundtrip", shift_k0_to_k1(s) == t, t)
        rep.tally("vertex-1-leaf", not s.children(1), t)
        (imp_t, _, pd_t), (imp_s, _, pd_s) = _tree_stats(t), _tree_stats(s)
        rep.tally("improper+1", imp_s == imp_t + 1, t)
        rep.tally("pdeg-multiset", sorted(pd_t[2:]) == sorted(pd_s[2:]), t)
    target = sum(1 for _ in enumerate_rooted_trees(n1, vertex1_children=0))
    rep.tally("cardinality", len(images) == target, f"n+1={n1}")


def _check_tree_pfd(rep: BijectionReport, n1: int):
    images = set()
    for t in enumerate_rooted_trees(n1):
        g, em = tree_to_pfd(t)
        images.add(g)
        rep.tally("roundtrip", pfd_to_tree(g) == t, t)
        rep.tally("deg0=k", g.deg0 == len(t.children(1)), t)
        ok = em.is_bijective_onto(t.edges(), g.edges())
        ok = ok and _edgewise(em, edge_classify_tree(t), edge_classify_pfd(g), lambda x: x)
        rep.tally("edgewise", ok, f"{t} -> {g}")
    rep.tally("cardinality", len(images) == n1 ** (n1 - 1), f"n+1={n1}")


def _check_phi_k0(rep: BijectionReport, n1: int):
    images = set()
    for t in enumerate_rooted_trees(n1, vertex1_children=0):
        s, em = phi_k0(t)
        images.add(s)
        rep.tally("roundtrip", phi_k0_inverse(s) == t, t)
        rep.tally("k=0", not any(c > s.root for c in s.children(s.root)), t)
        ok = em.is_bijective_onto(t.edges(), s.edges())
        ok = ok and _edgewise(em, edge_classify_tree(t), classify_edge_model1(s), _model1_label)
        rep.tally("edgewise", ok, f"{t} -> {s}")
    target = sum(1 for _ in enumerate_rooted_trees(n1, vertex1_children=0))
    rep.tally("cardinality", len(images) == target, f"n+1={n1}")


def _check_sigma(rep: BijectionReport, n1: int):
    images = set()
    for t in enumerate_rooted_trees(n1):
        k = len(t.children(1))
        s, em, case = model2_to_model1(t)
        images.add(s)
        rep.tally("roundtrip", model1_to_model2(s) == t, t)
        rep.tally("k-higher-children", sum(1 for c in s.children(s.root) if c > s.root) == k, t)
        src, img = edge_classify_tree(t), classify_edge_model1(s)
        ok = em.is_bijective_onto(t.edges(), s.edges())
        rep.tally("edge-bijection", ok, f"{t} -> {s}")
        ok = ok and _edgewise(em, src, img, _model1_label)
        rep.tally("edgewise", ok, f"case {case}: {t} -> {s}")
        n_src = sum(v == "improper" for v in src.values())
        n_img = sum(v == "irregular" for v in img.values())
        rep.tally("improper-count", n_src == n_img, f"case {case}: {t} -> {s}")
    rep.tally("cardinality", len(images) == n1 ** (n1 - 1), f"n+1={n1}")


def _trees_on(vertices):
    """Rooted trees on an arbitrary vertex set, as (root, parent dict)."""
    vs = sorted(vertices)
    for t in enumerate_rooted_trees(len(vs)):
        yield vs[t.root - 1], {vs[c - 1]: vs[p - 1] for c, p in enumerate(t.parent) if c and p}


def _quintuples(n1: int):
    n = n1 - 1
    for j in range(1, n + 1):
        for a in combinations(range(1, n + 1), j):
            rest = [v for v in range(1, n1 + 1) if v not in a]
            for r1, p1 in _trees_on(a):
                for r2, p2 in _trees_on(rest):
                    yield Quintuple.make(a, r1, p1, r2, p2)


def _triplets(n1: int):
    for t in enumerate_rooted_trees(n1):
        for c in t.children(t.root):
            if c < t.root:
                yield t, c


def _root_lower(t: RootedTree) -> int:
    return sum(1 for c in t.children(t.root) if c < t.root)


def fifthproof_count(n: int, k: int) -> tuple[int, int]:
    """(k t_{n,k}, sum_j C(n,j) j^(j-1) t_{n-j,k-1}) with t_{n,k} = C(n,k) n^(n-k)."""
    def t(m, i):
        return comb(m, i) * m ** (m - i) if 0 <= i <= m else 0

    rhs = sum(comb(n, j) * j ** (j - 1) * t(n - j, k - 1) for j in range(1, n + 1))
    return k * t(n, k), rhs


def _check_fifthproof(rep: BijectionReport, n1: int):
    n = n1 - 1
    for k in range(1, n + 1):
        lhs, rhs = fifthproof_count(n, k)
        rep.tally("counting-identity", lhs == rhs, f"(n,k)=({n},{k}): {lhs} vs {rhs}")
    n_trip = Counter(_root_lower(t) for t, _ in _triplets(n1))
    n_quint = Counter()
    images = Counter()
    for q in _quintuples(n1):
        low2 = sum(1 for c, p in q.t2_parent if p == q.t2_root and c < p)
        n_quint[low2 + 1] += 1
        try:
            t, star = fifthproof_join(q, n1)
        except UncoveredCase as exc:
            rep.tally("join-defined", False, exc)
            continue
        rep.tally("join-defined", True)
        images[(t, star)] += 1
        rep.tally("split-after-join", fifthproof_split(t, star) == q, q)
    rep.tally("enumerated-counts", n_trip == n_quint, f"n+1={n1}: {dict(n_trip)} vs {dict(n_quint)}")
    for key, c in sorted(images.items(), key=lambda kv: str(kv[0])):
        rep.tally("join-injective", c == 1, f"{key[0]} star {key[1]} hit {c} times")
    for t, star in _triplets(n1):
        q = fifthproof_split(t, star)
        try:
            back = fifthproof_join(q, n1)
        except (UncoveredCase, BadPrecondition) as exc:
            rep.tally("join-after-split", False, f"{t} star {star}: {exc}")
            continue
        rep.tally("join-after-split", back == (t, star), f"{t} star {star}")


_CHECKERS = {
    "shift": (_check_shift, 2),
    "tree-pfd": (_check_tree_pfd, 2),
    "phi-k0": (_check_phi_k0, 2),
    "sigma": (_check_sigma, 1),
    "fifthproof": (_check_fifthproof, 2),
}


def verify_bijection(name: str, max_vertices: int, min_vertices: int | None = None) -> BijectionReport:
    """Exhaustive round-trip and statistic checks for n+1 up to ``max_vertices``."""
    if name not in _CHECKERS:
        raise ValueError(f"unknown bijection {name!r}; choose from {', '.join(BIJECTIONS)}")
    fn, lo = _CHECKERS[name]
    rep = BijectionReport(name, max_vertices)
    for n1 in range(max(lo, min_vertices or lo), max_vertices + 1):
        fn(rep, n1)
    return rep
