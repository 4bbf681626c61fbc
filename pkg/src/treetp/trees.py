"""Labeled rooted trees and partial functional digraphs with their edge statistics."""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from math import factorial
from typing import Iterator

from .polyring import Polynomial

__all__ = [
    "RootedTree",
    "PFD",
    "UncoveredCase",
    "BadTree",
    "prufer_decode",
    "enumerate_unrooted_trees",
    "enumerate_rooted_trees",
    "edge_classify_tree",
    "tree_weight_yz",
    "tree_polynomial",
    "enumerate_pfd",
    "edge_classify_pfd",
    "pfd_polynomial",
    "classify_edge_model1",
    "model1_polynomial",
    "count_by_vertex1_children",
    "TREE_CAP",
]

# largest vertex count enumerated by default (symbolic weights)
TREE_CAP = 7

PROPER = "proper"
IMPROPER = "improper"
REGULAR = "regular"
IRREGULAR = "irregular"


class BadTree(ValueError):
    pass


class UncoveredCase(RuntimeError):
    """A configuration no classification rule or bijection case accounts for."""


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree on {1..n}; ``parent[v]`` for v = 1..n, 0 at the root (index 0 unused)."""

    n: int
    root: int
    parent: tuple

    def __post_init__(self):
        if len(self.parent) != self.n + 1:
            raise BadTree("parent table has wrong length")
        if not 1 <= self.root <= self.n or self.parent[self.root] != 0:
            raise BadTree("bad root")
        for v in range(1, self.n + 1):
            seen = set()
            u = v
            while u != self.root:
                if u in seen or not 1 <= self.parent[u] <= self.n:
                    raise BadTree(f"vertex {v} does not reach the root")
                seen.add(u)
                u = self.parent[u]

    @classmethod
    def from_parent_map(cls, n: int, root: int, parent: dict) -> "RootedTree":
        table = [0] * (n + 1)
        for c, p in parent.items():
            table[c] = p
        return cls(n, root, tuple(table))

    @classmethod
    def from_edges(cls, n: int, root: int, edges) -> "RootedTree":
        return cls.from_parent_map(n, root, {c: p for p, c in edges})

    @cached_property
    def children_map(self) -> dict:
        ch = {v: [] for v in range(1, self.n + 1)}
        for v in range(1, self.n + 1):
            if v != self.root:
                ch[self.parent[v]].append(v)
        return ch

    def children(self, v: int) -> list:
        return self.children_map[v]

    def edges(self) -> list:
        """(parent, child) pairs sorted by child."""
        return [(self.parent[v], v) for v in range(1, self.n + 1) if v != self.root]

    def preorder(self, start: int | None = None) -> list:
        start = self.root if start is None else start
        out, stack = [], [start]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children_map[v]))
        return out

    def descendants(self, v: int) -> set:
        return set(self.preorder(v))

    @cached_property
    def subtree_min(self) -> tuple:
        m = list(range(self.n + 1))
        for v in reversed(self.preorder()):
            if v != self.root:
                p = self.parent[v]
                if m[v] < m[p]:
                    m[p] = m[v]
        return tuple(m)

    def is_ancestor(self, a: int, v: int) -> bool:
        """a is v or an ancestor of v."""
        while True:
            if v == a:
                return True
            if v == self.root:
                return False
            v = self.parent[v]

    def path_from_root(self, v: int) -> list:
        path = [v]
        while v != self.root:
            v = self.parent[v]
            path.append(v)
        return path[::-1]

    def to_text(self) -> str:
        pairs = " ".join(f"{p}-{c}" for p, c in self.edges())
        return f"{self.n}; {self.root}; {pairs}".rstrip()

    @classmethod
    def from_text(cls, text: str) -> "RootedTree":
        parts = [s.strip() for s in text.split(";")]
        if len(parts) != 3:
            raise BadTree("expected 'n; root; p-c p-c ...'")
        n, root = int(parts[0]), int(parts[1])
        edges = []
        for tok in parts[2].split():
            p, c = tok.split("-")
            edges.append((int(p), int(c)))
        if len(edges) != n - 1:
            raise BadTree("wrong number of edges")
        return cls.from_edges(n, root, edges)

    def __str__(self):
        return self.to_text()


# enumeration

def prufer_decode(seq, n: int) -> list:
    """Edges of the labeled tree on {1..n} with Prüfer sequence ``seq``."""
    if n == 1:
        return []
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((u, w))
    return edges


def enumerate_unrooted_trees(n: int) -> Iterator[list]:
    """Adjacency lists (index 0 unused) for every labeled tree on {1..n}."""
    if n < 1:
        raise ValueError("n must be at least 1")
    for seq in product(range(1, n + 1), repeat=max(n - 2, 0)):
        adj = [[] for _ in range(n + 1)]
        for a, b in prufer_decode(seq, n):
            adj[a].append(b)
            adj[b].append(a)
        yield adj


def _root_at(adj, n: int, root: int) -> RootedTree:
    parent = [0] * (n + 1)
    stack = [root]
    seen = [False] * (n + 1)
    seen[root] = True
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                stack.append(w)
    t = object.__new__(RootedTree)
    object.__setattr__(t, "n", n)
    object.__setattr__(t, "root", root)
    object.__setattr__(t, "parent", tuple(parent))
    return t


def enumerate_rooted_trees(n: int, vertex1_children: int | None = None,
                           root_higher_children: int | None = None) -> Iterator[RootedTree]:
    """Every rooted tree on {1..n} once (n^(n-1) of them), optionally filtered.

    ``vertex1_children=k`` keeps trees where vertex 1 has k children;
    ``root_higher_children=k`` keeps trees whose root has k children above it.
    """
    for adj in enumerate_unrooted_trees(n):
        for root in range(1, n + 1):
            if vertex1_children is not None:
                c1 = len(adj[1]) - (0 if root == 1 else 1)
                if c1 != vertex1_children:
                    continue
            if root_higher_children is not None:
                # a neighbour above the root is always a child of the root
                if sum(1 for w in adj[root] if w > root) != root_higher_children:
                    continue
            yield _root_at(adj, n, root)


def count_by_vertex1_children(n: int) -> list[int]:
    """Counts of rooted trees on {1..n} by number of children of vertex 1.

    Walks every Prüfer sequence once: vertex 1 has degree mult+1, and it has
    that many children when it is the root and one fewer otherwise.
    """
    counts = [0] * n
    if n == 1:
        return [1]
    for seq in product(range(1, n + 1), repeat=n - 2):
        m = seq.count(1)
        counts[m + 1] += 1
        counts[m] += n - 1
    return counts


# edge statistics on trees

def edge_classify_tree(t: RootedTree) -> dict:
    sm = t.subtree_min
    return {(p, c): (IMPROPER if sm[c] < p else PROPER) for p, c in t.edges()}


def _tree_stats(t: RootedTree):
    """(improper count, proper count, pdeg table)."""
    sm = t.subtree_min
    imp = 0
    pdeg = [0] * (t.n + 1)
    for v in range(1, t.n + 1):
        if v == t.root:
            continue
        p = t.parent[v]
        if sm[v] < p:
            imp += 1
        else:
            pdeg[p] += 1
    return imp, t.n - 1 - imp, pdeg


def tree_weight_yz(t: RootedTree) -> Polynomial:
    imp, prop, _ = _tree_stats(t)
    k = len(t.children(1))
    return Polynomial({(0, imp, prop - k): 1})


def _yz_poly(counter: Counter) -> Polynomial:
    return Polynomial({(0, a, b): c for (a, b), c in counter.items()})


def _yphi_poly(counter: Counter) -> Polynomial:
    """Counter keyed by (improper count, sorted tuple of weighted degrees)."""
    terms: dict = {}
    for (imp, degs), c in counter.items():
        coef = c
        ex = Counter(degs)
        top = max(degs) if degs else -1
        mono = [0] * (4 + top + 1)
        mono[1] = imp
        for d, mult in ex.items():
            coef *= factorial(d) ** mult
            mono[4 + d] = mult
        key = tuple(mono)
        terms[key] = terms.get(key, 0) + coef
    return Polynomial(terms)


def _check_cap(vertices: int, cap: int | None):
    cap = TREE_CAP if cap is None else cap
    if vertices > cap:
        raise ValueError(f"{vertices} vertices exceeds the enumeration cap {cap}")


def tree_polynomial(n: int, k: int, mode: str = "yz", cap: int | None = None) -> Polynomial:
    """Sum over rooted trees on {1..n+1} where vertex 1 has k children.

    yz: y^improper z^(proper - k).
    yphi: y^improper times prod over i != 1 of pdeg(i)! phi_pdeg(i).
    """
    if not 0 <= k <= n:
        return Polynomial()
    _check_cap(n + 1, cap)
    acc: Counter = Counter()
    for t in enumerate_rooted_trees(n + 1, vertex1_children=k):
        imp, prop, pdeg = _tree_stats(t)
        if mode == "yz":
            acc[(imp, prop - k)] += 1
        elif mode == "yphi":
            acc[(imp, tuple(sorted(pdeg[2:])))] += 1
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return _yz_poly(acc) if mode == "yz" else _yphi_poly(acc)


# partial functional digraphs

@dataclass(frozen=True)
class PFD:
    """Partial functional digraph on {1..n}; ``out[v]`` is the head of v's edge or 0."""

    n: int
    out: tuple

    def __post_init__(self):
        if len(self.out) != self.n + 1:
            raise ValueError("out table has wrong length")
        if any(not 0 <= h <= self.n for h in self.out[1:]):
            raise ValueError("edge head out of range")

    @classmethod
    def from_edges(cls, n: int, edges) -> "PFD":
        out = [0] * (n + 1)
        for a, b in edges:
            if out[a]:
                raise ValueError(f"vertex {a} has two outgoing edges")
            out[a] = b
        return cls(n, tuple(out))

    def edges(self) -> list:
        return [(v, self.out[v]) for v in range(1, self.n + 1) if self.out[v]]

    @property
    def deg0(self) -> int:
        return sum(1 for v in range(1, self.n + 1) if not self.out[v])

    def cyclic_vertices(self) -> set:
        cyc = set()
        for v in range(1, self.n + 1):
            seen = []
            u = v
            while u and u not in seen:
                seen.append(u)
                u = self.out[u]
            if u:
                cyc.update(seen[seen.index(u):])
        return cyc

    @cached_property
    def predecessor_min(self) -> tuple:
        """Smallest vertex from which v is reachable (v included)."""
        m = list(range(self.n + 1))
        for v in range(1, self.n + 1):
            seen = set()
            u = v
            while u and u not in seen:
                seen.add(u)
                if v < m[u]:
                    m[u] = v
                u = self.out[u]
        return tuple(m)

    def to_text(self) -> str:
        return f"{self.n}; " + " ".join(f"{a}>{b}" for a, b in self.edges())

    @classmethod
    def from_text(cls, text: str) -> "PFD":
        head, _, rest = text.partition(";")
        n = int(head)
        edges = []
        for tok in rest.split():
            a, b = tok.split(">")
            edges.append((int(a), int(b)))
        return cls.from_edges(n, edges)

    def __str__(self):
        return self.to_text()


def enumerate_pfd(n: int, k: int) -> Iterator[PFD]:
    """Every PFD on {1..n} with exactly k vertices of out-degree 0."""
    if not 0 <= k <= n:
        return
    verts = range(1, n + 1)
    for sinks in combinations(verts, k):
        others = [v for v in verts if v not in sinks]
        for heads in product(verts, repeat=n - k):
            out = [0] * (n + 1)
            for v, h in zip(others, heads):
                out[v] = h
            yield PFD(n, tuple(out))


def edge_classify_pfd(g: PFD) -> dict:
    pm = g.predecessor_min
    return {(a, b): (IMPROPER if pm[a] <= b else PROPER) for a, b in g.edges()}


def pfd_polynomial(n: int, k: int, mode: str = "yz", cap: int | None = None) -> Polynomial:
    """yz: y^improper z^proper; yphi: y^improper prod_i pindeg(i)! phi_pindeg(i)."""
    if not 0 <= k <= n:
        return Polynomial()
    _check_cap(n + 1, cap)
    acc: Counter = Counter()
    for g in enumerate_pfd(n, k):
        pm = g.predecessor_min
        imp = 0
        pin = [0] * (n + 1)
        for a in range(1, n + 1):
            b = g.out[a]
            if not b:
                continue
            if pm[a] <= b:
                imp += 1
            else:
                pin[b] += 1
        if mode == "yz":
            acc[(imp, n - k - imp)] += 1
        elif mode == "yphi":
            acc[(imp, tuple(sorted(pin[1:])))] += 1
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return _yz_poly(acc) if mode == "yz" else _yphi_poly(acc)


# regular/irregular classification for trees whose root has k higher children

def _increasing_subtree(t: RootedTree, v: int) -> list:
    out, stack = [], [v]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(c for c in t.children(u) if c > u)
    return out


def _hanging_min(t: RootedTree, core: set) -> dict:
    """For each w in ``core``: smallest vertex reachable from w without core edges."""
    out = {}
    for w in core:
        best, stack = w, [c for c in t.children(w) if c not in core]
        while stack:
            u = stack.pop()
            best = min(best, u)
            stack.extend(t.children(u))
        out[w] = best
    return out


def classify_edge_model1(t: RootedTree, b4_reading: str = "component") -> dict:
    """Label each edge regular or irregular.

    Decreasing edges are irregular; increasing edges at the root are regular.
    When vertex 1 has a child below the root, edges of the maximal increasing
    subtree T1 at 1 follow the threshold rules (a), (b1)-(b5); when all
    children of 1 are above the root, an edge 1->j is irregular iff j has a
    descendant below the root. Remaining increasing edges are irregular
    exactly when improper.

    In rule (b4) the descendants of v_{tau+1} are taken inside the tree
    hanging from v_{tau+1} off T1 (``b4_reading="component"``). The reading
    "all descendants in T" (``"literal"``) also counts T1-descendants of
    v_{tau+1} that are not below v_t, and breaks the count from 6 vertices on.
    """
    if b4_reading not in ("component", "literal"):
        raise ValueError(f"unknown b4 reading {b4_reading!r}")
    rho = t.root
    sm = t.subtree_min
    c1 = t.children(1)
    low_child = rho != 1 and any(c < rho for c in c1)
    all_high = all(c > rho for c in c1)

    t1 = idx = path = None
    ell = None
    if low_child:
        vs = sorted(_increasing_subtree(t, 1))
        t1 = set(vs)
        v = [None] + vs  # 1-based: v[1] = 1
        idx = {u: i for i, u in enumerate(v) if u is not None}
        ell = sum(1 for u in vs if u < rho) - 1
        if rho in t1:
            raise UncoveredCase(f"root inside the increasing subtree at 1: {t}")
        hang = _hanging_min(t, t1)
        target = v[ell + 1]
        path = set()
        u = target
        while u != 1:
            path.add((t.parent[u], u))
            u = t.parent[u]

    labels = {}
    for p, c in t.edges():
        if p == rho:
            labels[(p, c)] = REGULAR if p < c else IRREGULAR
        elif p > c:
            labels[(p, c)] = IRREGULAR
        elif low_child and p in t1 and c in t1:
            if (p, c) in path:
                labels[(p, c)] = IRREGULAR
                continue
            s, tt = idx[p], idx[c]
            if s >= ell + 2:
                irr = sm[c] < v[s]
            elif s <= ell and tt >= ell + 2:
                irr = sm[c] < v[s + 1]
            elif s == ell + 1:
                irr = sm[c] < rho
            elif tt <= ell:
                below = _increasing_subtree(t, c)
                if v[ell + 1] in below:
                    raise UncoveredCase(f"threshold vertex below an off-path edge {p}->{c}: {t}")
                reach = sm if b4_reading == "literal" else hang
                irr = False
                for u in below:
                    tau = idx[u]
                    if tau + 1 <= ell + 1 and reach[v[tau + 1]] < v[s + 1]:
                        irr = True
                        break
                    if u > rho and hang[u] < v[s + 1]:
                        irr = True
                        break
            else:
                raise UncoveredCase(f"edge {p}->{c} matches no threshold rule: {t}")
            labels[(p, c)] = IRREGULAR if irr else REGULAR
        elif all_high and p == 1:
            labels[(p, c)] = IRREGULAR if sm[c] < rho else REGULAR
        elif sm[c] < p:
            labels[(p, c)] = IRREGULAR
        else:
            labels[(p, c)] = REGULAR
    return labels


def model1_polynomial(n: int, k: int, mode: str = "yz", cap: int | None = None,
                      b4_reading: str = "component") -> Polynomial:
    """Sum over trees on {1..n+1} whose root has k higher children.

    yz: y^irreg z^(reg - k).
    yphi: y^irreg times prod over non-root i of rdeg(i)! phi_rdeg(i), where
    rdeg(i) counts children of i joined by regular edges.
    """
    if mode not in ("yz", "yphi"):
        raise ValueError(f"unknown mode {mode!r}")
    if not 0 <= k <= n:
        return Polynomial()
    _check_cap(n + 1, cap)
    acc: Counter = Counter()
    for t in enumerate_rooted_trees(n + 1, root_higher_children=k):
        labels = classify_edge_model1(t, b4_reading)
        irr = sum(1 for v in labels.values() if v == IRREGULAR)
        if mode == "yz":
            acc[(irr, n - irr - k)] += 1
            continue
        rdeg = Counter(p for (p, _), v in labels.items() if v == REGULAR)
        acc[(irr, tuple(sorted(rdeg[i] for i in range(1, n + 2) if i != t.root)))] += 1
    return _yz_poly(acc) if mode == "yz" else _yphi_poly(acc)
