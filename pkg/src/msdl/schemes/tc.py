"""Compressed storage for a transitively closed binary relation.

The relation's graph is condensed into strongly connected components (SCC
nodes). Every node receives a post-order id from a DFS spanning forest and
owns the integer slots ``[lo, id]``; the slots below ``id`` are head-room for
nodes inserted later. A node's reach is stored as an :class:`IntervalSet`
holding the owned slots of every node it reaches, so each slot is covered
only by nodes that reach its owner.

Per node, ``In`` is the reach in domain I, ``D`` the reach gained in the
current round, and ``N`` the slots of nodes created in the current round
(``N = (In ∪ D) ∩ fresh``). When a round merges SCCs the representative
``e`` has status *new*, ``e.D`` holds the reach of the merged component
regardless of domain, and the absorbed nodes keep their old ``In`` and
members (status *dropped*) until :meth:`TcScheme.merge`.
"""
from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right
from typing import Iterable, Iterator

from ..intervals import EMPTY, IntervalSet, ProbeCounter, union_many
from ..joins import FactCache, apply_rule
from ..syntax import Fact, Rule
from .base import Domain, InvariantError, Pattern, Scheme

log = logging.getLogger(__name__)

STABLE, NEW, DROPPED = 0, 1, 2
STATUS_NAMES = {STABLE: "stable", NEW: "new", DROPPED: "dropped"}
DEFAULT_SPACING = 16
_ALL = Domain.ALL


class SccNode:
    __slots__ = (
        "id", "lo", "tin_lo", "In", "D", "N", "status", "members", "F", "rep",
        "succ", "pred", "tree_parent", "selfloop",
    )

    def __init__(self, members: list[int]):
        self.id = -1
        self.lo = -1
        self.tin_lo = -1
        self.In = EMPTY
        self.D = EMPTY
        self.N = EMPTY
        self.status = STABLE
        self.members = members
        self.F: list[SccNode] | None = None
        self.rep: SccNode | None = None
        self.succ: set[SccNode] = set()
        self.pred: set[SccNode] = set()
        self.tree_parent: SccNode | None = None
        self.selfloop = False

    @property
    def cyclic(self) -> bool:
        return self.selfloop or len(self.members) > 1

    def own(self) -> IntervalSet:
        return IntervalSet.span(self.lo, self.id)

    @property
    def tin(self) -> tuple[int, int]:
        return (self.tin_lo, self.id)

    def __repr__(self) -> str:
        return f"<SccNode id={self.id} {STATUS_NAMES[self.status]} M={self.members}>"

    def __hash__(self) -> int:
        return id(self)

    def __eq__(self, other) -> bool:
        return self is other


def is_transitive_rule(rule: Rule) -> bool:
    """``R(x,z) :- R(x,y), R(y,z)`` up to variable renaming and body order."""
    h = rule.head
    if len(rule.body) != 2 or h.arity != 2 or any(a.pred != h.pred or a.arity != 2 for a in rule.body):
        return False
    terms = [t for a in (h, *rule.body) for t in a.args]
    if not all(t.var for t in terms):
        return False
    x, z = h.args[0].sym, h.args[1].sym
    if x == z:
        return False
    for first, second in (rule.body, rule.body[::-1]):
        a0, a1 = first.args[0].sym, first.args[1].sym
        b0, b1 = second.args[0].sym, second.args[1].sym
        if a0 == x and b1 == z and a1 == b0 and a1 not in (x, z):
            return True
    return False


class TcScheme(Scheme):
    kind = "tc"

    def __init__(self, name: str, pred: int, rules: Iterable[Rule] = (), spacing: int = DEFAULT_SPACING):
        rules = list(rules)
        super().__init__(name, [pred], rules)
        if spacing < 1:
            raise ValueError("spacing must be positive")
        self.pred = pred
        self.spacing = spacing
        self.extra_rules = [r for r in rules if not is_transitive_rule(r)]
        self.body_preds.add(pred)
        extra_body = {a.pred for r in self.extra_rules for a in r.body}
        self.skip_own_delta = pred not in extra_body
        self._cache_preds = extra_body
        self.cache = FactCache()
        self.edges: set[tuple[int, int]] = set()
        self._pending: list[tuple[int, int]] = []
        self._pending_set: set[tuple[int, int]] = set()
        self._scheduled_edges: set[tuple[int, int]] = set()
        self._ids: list[int] = []
        self._L: list[SccNode] = []
        self._node_of: dict[int, SccNode] = {}
        self._fresh = EMPTY
        self._touched: set[SccNode] = set()
        self._groups: list[SccNode] = []
        self._retired: set[int] = set()
        self._next_top = 0
        self.overflow = 0
        self.renumber_count = 0
        self.round = 0

    # -- node bookkeeping ----------------------------------------------------

    def _register(self, node: SccNode) -> None:
        k = bisect_left(self._ids, node.id)
        if k < len(self._ids) and self._ids[k] == node.id:
            raise InvariantError(f"id {node.id} allocated twice")
        self._ids.insert(k, node.id)
        self._L.insert(k, node)
        for c in node.members:
            self._node_of[c] = node

    def _new_root(self, const: int) -> SccNode:
        node = SccNode([const])
        self._next_top += self.spacing
        node.id = self._next_top
        node.lo = node.tin_lo = node.id - self.spacing + 1
        self._register(node)
        self._fresh = self._fresh | node.own()
        return node

    def _free_slot(self, parent: SccNode) -> int | None:
        ids = self._ids
        k = bisect_left(ids, parent.lo)
        for g in range(parent.lo, parent.id):
            if k < len(ids) and ids[k] == g:
                k += 1
                continue
            if g not in self._retired:
                return g
        return None

    @staticmethod
    def _live(node: SccNode) -> SccNode:
        return node.rep if node.status == DROPPED else node

    @staticmethod
    def _total(node: SccNode) -> IntervalSet:
        """Reach regardless of domain."""
        return node.D if node.status == NEW else node.In | node.D

    def _reach_gain(self, node: SccNode) -> IntervalSet:
        """What a node gains in reach by reaching ``node``."""
        if node.status == NEW:
            return node.D
        return union_many((node.In, node.D, node.own()))

    def node_of(self, const: int) -> SccNode | None:
        """Node currently holding ``const`` in its member map."""
        return self._node_of.get(const)

    @property
    def nodes(self) -> list[SccNode]:
        """Post-order list L (includes dropped nodes until merge)."""
        return list(self._L)

    # -- scheme contract -----------------------------------------------------

    def schedule(self, fact: Fact) -> None:
        pred = fact[0]
        if pred == self.pred:
            a, b = fact[1], fact[2]
            if not self.contains_pair(a, b, Domain.ALL):
                if (a, b) not in self._pending_set:
                    self._pending_set.add((a, b))
                    self._pending.append((a, b))
                    self.edges.add((a, b))
            elif not self.contains_pair(a, b, Domain.DELTA):
                self.edges.add((a, b))
        if pred in self._cache_preds:
            self.cache.add(fact)

    def derive(self) -> Iterator[Fact]:
        self.round += 1
        self._scheduled_edges = set(self._pending_set)
        if self.extra_rules and self.cache:
            for rule in self.extra_rules:
                for h in list(apply_rule(rule, self.cache, self.registry)):
                    a, b = h[1], h[2]
                    if not self.contains_pair(a, b, Domain.ALL) and (a, b) not in self._pending_set:
                        self._pending_set.add((a, b))
                        self._pending.append((a, b))
        self.cache.clear()
        edges, self._pending, self._pending_set = self._pending, [], set()
        if edges:
            if not self._L:
                self.build(edges)
            else:
                for a, b in edges:
                    self.insert_edge(a, b)
        return self.delta()

    def has_delta(self) -> bool:
        if self._groups:
            return True
        return any(x.status == STABLE and (x.D or x.N) for x in self._touched)

    def merge(self) -> None:
        for x in self._touched:
            if x.status == STABLE:
                if x.D:
                    x.In = x.In | x.D
                x.D = EMPTY
                x.N = EMPTY
        dropped: set[int] = set()
        for e in self._groups:
            if e.status != NEW:
                continue
            members = []
            for s in e.F:
                members.extend(s.members)
                if s is not e:
                    dropped.add(s.id)
                    s.F = None
            e.members = members
            for c in members:
                self._node_of[c] = e
            e.In = e.D
            e.D = e.N = EMPTY
            e.F = None
            e.rep = None
            e.status = STABLE
        if dropped:
            keep = [k for k, i in enumerate(self._ids) if i not in dropped]
            self._ids = [self._ids[k] for k in keep]
            self._L = [self._L[k] for k in keep]
            self._retired |= dropped
        self._touched = set()
        self._groups = []
        self._fresh = EMPTY
        self._scheduled_edges = set()
        if self.overflow:
            log.info("%s: %d fresh nodes outside parent gaps, renumbering", self.name, self.overflow)
            self.overflow = 0
            self.renumber()

    # -- domain views ----------------------------------------------------------

    def _view(self, s: SccNode, domain: Domain) -> IntervalSet:
        if s.status == STABLE:
            if domain == Domain.ALL:
                return s.In | s.D
            if domain == Domain.I:
                return s.In - s.N
            return s.D | s.N
        e = s.rep
        if domain == Domain.ALL:
            return e.D
        if domain == Domain.I:
            return s.In - e.N
        return (e.D - s.In) | (e.N & s.In)

    def _has(self, s: SccNode, xid: int, domain: Domain) -> bool:
        if s.status == STABLE:
            if domain == Domain.ALL:
                return xid in s.In or xid in s.D
            if domain == Domain.I:
                return xid in s.In and xid not in s.N
            return xid in s.D or xid in s.N
        e = s.rep
        if domain == Domain.ALL:
            return xid in e.D
        in_old = xid in s.In
        if domain == Domain.I:
            return in_old and xid not in e.N
        return xid in e.N if in_old else xid in e.D

    def contains_pair(self, a: int, b: int, domain: Domain = Domain.ALL) -> bool:
        node_of = self._node_of
        s = node_of.get(a)
        if s is None:
            return False
        x = node_of.get(b)
        if x is None:
            return False
        if s.status == STABLE and domain is _ALL:
            # hot path for point queries: inlined interval lookups
            xid = x.id
            seg = s.In._lo
            if seg:
                k = bisect_right(seg, xid) - 1
                if k >= 0 and xid <= s.In._hi[k]:
                    return True
            return bool(s.D._lo) and xid in s.D
        return self._has(s, x.id, domain)

    def probe_pair(self, a: int, b: int, counter: ProbeCounter, domain: Domain = Domain.ALL) -> bool:
        """:meth:`contains_pair` that records segment comparisons in ``counter``."""
        s = self._node_of.get(a)
        x = self._node_of.get(b)
        if s is None or x is None:
            return False
        xid = x.id
        if s.status == STABLE:
            if domain == Domain.ALL:
                return s.In.probe(xid, counter) or s.D.probe(xid, counter)
            if domain == Domain.I:
                return s.In.probe(xid, counter) and not s.N.probe(xid, counter)
            return s.D.probe(xid, counter) or s.N.probe(xid, counter)
        e = s.rep
        if domain == Domain.ALL:
            return e.D.probe(xid, counter)
        in_old = s.In.probe(xid, counter)
        if domain == Domain.I:
            return in_old and not e.N.probe(xid, counter)
        return e.N.probe(xid, counter) if in_old else e.D.probe(xid, counter)

    def contains(self, fact: Fact, domain: Domain = Domain.ALL) -> bool:
        return fact[0] == self.pred and self.contains_pair(fact[1], fact[2], domain)

    def _nodes_in(self, ids: IntervalSet) -> Iterator[SccNode]:
        """Nodes of L whose id lies in ``ids`` (gap slots are skipped)."""
        all_ids, L = self._ids, self._L
        for lo, hi in ids.segments():
            i = bisect_left(all_ids, lo)
            j = bisect_right(all_ids, hi)
            yield from L[i:j]

    def scan(self, pred: int, pattern: Pattern, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        if pred != self.pred:
            return iter(())
        a, b = pattern
        if a is not None:
            return self._scan_from(a, b, domain)
        if b is not None:
            return self._scan_to(b, domain)
        return self._scan_every(domain)

    def _scan_from(self, a: int, b: int | None, domain: Domain) -> Iterator[Fact]:
        R = self.pred
        if b is not None:
            if self.contains_pair(a, b, domain):
                yield (R, a, b)
            return
        s = self._node_of.get(a)
        if s is None:
            return
        for x in self._nodes_in(self._view(s, domain)):
            for c in x.members:
                yield (R, a, c)

    def _scan_to(self, b: int, domain: Domain) -> Iterator[Fact]:
        R = self.pred
        x = self._node_of.get(b)
        if x is None:
            return
        xid = x.id
        for s in list(self._L):
            if self._has(s, xid, domain):
                for a in s.members:
                    yield (R, a, b)

    def _scan_every(self, domain: Domain) -> Iterator[Fact]:
        R = self.pred
        for s in list(self._L):
            view = self._view(s, domain)
            if not view:
                continue
            targets = [c for x in self._nodes_in(view) for c in x.members]
            for a in s.members:
                for c in targets:
                    yield (R, a, c)

    def scan_all(self, domain: Domain = Domain.ALL) -> Iterator[Fact]:
        return self._scan_every(domain)

    def delta(self) -> Iterator[Fact]:
        R = self.pred
        for s in self._delta_nodes():
            view = self._view(s, Domain.DELTA)
            targets = [c for x in self._nodes_in(view) for c in x.members]
            for a in s.members:
                for c in targets:
                    yield (R, a, c)

    def new_delta(self) -> Iterator[Fact]:
        skip = self._scheduled_edges
        if not skip:
            return self.delta()
        return (f for f in self.delta() if (f[1], f[2]) not in skip)

    def _delta_nodes(self) -> list[SccNode]:
        out = [x for x in self._touched if x.status == STABLE and (x.D or x.N)]
        for e in self._groups:
            if e.status == NEW:
                out.extend(e.F)
        out.sort(key=lambda n: n.id)
        return out

    # -- counting without enumeration -----------------------------------------

    def _weights(self) -> list[int]:
        prefix = [0]
        for node in self._L:
            prefix.append(prefix[-1] + len(node.members))
        return prefix

    def count(self, domain: Domain = Domain.ALL) -> int:
        prefix = self._weights()
        ids = self._ids
        total = 0
        for s in self._L:
            view = self._view(s, domain)
            reached = 0
            for lo, hi in view.segments():
                reached += prefix[bisect_right(ids, hi)] - prefix[bisect_left(ids, lo)]
            total += reached * len(s.members)
        return total

    def stats(self) -> dict:
        live = [n for n in self._L if n.status != DROPPED]
        return {
            "kind": self.kind,
            "name": self.name,
            "nodes": len(live),
            "dropped": len(self._L) - len(live),
            "constants": len(self._node_of),
            "segments_in": sum(n.In.nsegments for n in self._L),
            "segments_d": sum(n.D.nsegments for n in self._L),
            "segments_n": sum(n.N.nsegments for n in self._L),
            "explicit_edges": len(self.edges),
            "represented_facts": self.count(Domain.ALL),
            "renumbered": self.renumber_count,
        }

    def segment_count(self) -> int:
        return sum(n.In.nsegments + n.D.nsegments + n.N.nsegments for n in self._L)

    # -- construction ----------------------------------------------------------

    def build(self, edges: list[tuple[int, int]]) -> None:
        """Label an empty store from a batch of edges; all reach goes to D."""
        if self._L:
            raise InvariantError("build() on a non-empty store")
        adj: dict[int, list[int]] = {}
        for a, b in edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, [])
        comps = _tarjan(sorted(adj), adj)
        comp_node: dict[int, SccNode] = {}
        nodes = []
        for comp in comps:
            node = SccNode(sorted(comp))
            nodes.append(node)
            for c in comp:
                comp_node[c] = node
        for a, b in edges:
            u, v = comp_node[a], comp_node[b]
            if u is v:
                if a == b:
                    u.selfloop = True
            else:
                u.succ.add(v)
                v.pred.add(u)
        reach = self._label(nodes)
        self._ids = [n.id for n in self._L]
        for node in nodes:
            node.D = reach[node]
            if node.D:
                self._touched.add(node)
            for c in node.members:
                self._node_of[c] = node

    def _label(self, nodes: list[SccNode]) -> dict[SccNode, IntervalSet]:
        """DFS spanning forest, post-order ids with spacing, and reach sets."""
        order = sorted(nodes, key=lambda n: n.members[0])
        rank = {n: k for k, n in enumerate(order)}
        roots = [n for n in order if not n.pred]
        post: list[SccNode] = []
        visited: set[SccNode] = set()
        next_id = 0
        S = self.spacing
        for root in roots:
            root.tree_parent = None
            visited.add(root)
            stack = [(root, iter(sorted(root.succ, key=rank.__getitem__)))]
            while stack:
                node, it = stack[-1]
                child = next(it, None)
                if child is None:
                    stack.pop()
                    next_id += S
                    node.id = next_id
                    node.lo = next_id - S + 1
                    kids = [c.tin_lo for c in node.succ if c.tree_parent is node]
                    node.tin_lo = min([node.lo, *kids])
                    post.append(node)
                elif child not in visited:
                    visited.add(child)
                    child.tree_parent = node
                    stack.append((child, iter(sorted(child.succ, key=rank.__getitem__))))
        if len(post) != len(nodes):
            raise InvariantError("condensed graph is not acyclic")
        self._next_top = max(self._next_top, next_id)
        self._L = post
        reach: dict[SccNode, IntervalSet] = {}
        for node in post:
            parts = []
            for v in node.succ:
                parts.append(reach[v])
                parts.append(IntervalSet.span(v.lo, v.id))
            if node.cyclic:
                parts.append(IntervalSet.span(node.lo, node.id))
            reach[node] = union_many(parts)
        return reach

    def renumber(self) -> None:
        """Recompute ids and intervals from the condensed graph.

        Only valid between rounds; the represented fact sets do not change.
        """
        if self._touched or self._groups or self._pending:
            raise InvariantError("renumber() during a round")
        nodes = list(self._L)
        reach = self._label(nodes)
        self._ids = [n.id for n in self._L]
        self._next_top = self._L[-1].id if self._L else 0
        for node in nodes:
            node.In = reach[node]
        self._retired = set()
        self.renumber_count += 1

    # -- incremental insertion -------------------------------------------------

    def insert_edge(self, a: int, b: int) -> None:
        s = self._node_of.get(a)
        t = self._node_of.get(b)
        if s is None and t is None:
            k = self._new_root(a)
            if a == b:
                self._self_loop(k)
            else:
                self._fresh_child(k, b)
        elif s is None:
            k = self._new_root(a)
            target = self._live(t)
            gain = self._reach_gain(target)
            self._link(k, target)
            k.D = gain
            k.N = gain & self._fresh
            self._touched.add(k)
        elif t is None:
            self._fresh_child(s, b)
        else:
            self._insert_known(self._live(s), self._live(t))

    def _link(self, u: SccNode, v: SccNode) -> None:
        u.succ.add(v)
        v.pred.add(u)

    def _fresh_child(self, parent_orig: SccNode, const: int) -> None:
        parent = self._live(parent_orig)
        g = self._free_slot(parent_orig)
        if g is None:
            self.overflow += 1
            k = self._new_root(const)
        else:
            k = SccNode([const])
            k.id = k.lo = k.tin_lo = g
            k.tree_parent = parent_orig
            self._register(k)
            self._fresh = self._fresh | k.own()
        self._link(parent, k)
        gain = k.own()
        self._propagate(parent, gain, include_start=True)

    def _self_loop(self, node: SccNode) -> None:
        if node.id in self._total(node):
            return
        node.selfloop = True
        own = node.own()
        self._add_reach(node, own, own & self._fresh)

    def _insert_known(self, i: SccNode, j: SccNode) -> None:
        if i is j:
            self._self_loop(i)
            return
        if i.id in self._total(j):
            self._merge_cycle(i, j)
            return
        self._link(i, j)
        if j.id in self._total(i):
            return
        self._propagate(i, self._reach_gain(j), include_start=True)

    def _add_reach(self, x: SccNode, gain: IntervalSet, fresh_gain: IntervalSet) -> bool:
        if x.status == NEW:
            add = gain - x.D
            if add:
                x.D = x.D | add
        else:
            add = (gain - x.In) - x.D
            if add:
                x.D = x.D | add
        nadd = fresh_gain - x.N
        if nadd:
            x.N = x.N | nadd
        if add or nadd:
            self._touched.add(x)
            return True
        return False

    def _propagate(self, start: SccNode, gain: IntervalSet, include_start: bool) -> None:
        """Add ``gain`` to the reach of every node that reaches ``start``.

        A node that gains nothing needs no further walk upstream: its
        predecessors already reach everything it reaches.
        """
        fresh_gain = gain & self._fresh
        queue = [start] if include_start else list(start.pred)
        seen = set(queue)
        while queue:
            x = queue.pop()
            if not self._add_reach(x, gain, fresh_gain):
                continue
            for y in x.pred:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)

    def _merge_cycle(self, i: SccNode, j: SccNode) -> None:
        """Edge i→j where j already reaches i: collapse every node on a j⇝i path."""
        iid = i.id
        comp = []
        stack, seen = [j], {j}
        while stack:
            x = stack.pop()
            if x is not i and iid not in self._total(x):
                continue
            comp.append(x)
            for y in x.succ:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if i not in comp:
            raise InvariantError("cycle merge lost its closing node")
        e = max(comp, key=lambda n: n.id)
        originals: list[SccNode] = []
        parts = []
        for x in comp:
            if x.status == NEW:
                originals.extend(x.F)
                parts.append(x.D)
            else:
                originals.append(x)
                parts.extend((x.In, x.D, x.own()))
        merged = set(comp)
        succ = set().union(*(x.succ for x in comp)) - merged
        pred = set().union(*(x.pred for x in comp)) - merged
        for x in comp:
            for y in x.succ:
                y.pred.discard(x)
            for y in x.pred:
                y.succ.discard(x)
            x.succ = set()
            x.pred = set()
        e.D = union_many(parts)
        e.N = e.D & self._fresh
        e.status = NEW
        e.rep = e
        e.F = originals
        e.selfloop = True
        for s in originals:
            if s is not e:
                s.status = DROPPED
                s.rep = e
                s.F = None
                s.D = EMPTY
                s.N = EMPTY
                self._touched.discard(s)
        self._groups = [g for g in self._groups if g.status == NEW and g is not e]
        self._groups.append(e)
        e.succ = succ
        e.pred = pred
        for y in succ:
            y.pred.add(e)
        for y in pred:
            y.succ.add(e)
        self._touched.add(e)
        self._propagate(e, e.D, include_start=False)

    # -- persistence -----------------------------------------------------------

    def __getstate__(self):
        nodes = list(self._L)
        index = {n: k for k, n in enumerate(nodes)}
        # dropped nodes only exist mid-round; snapshots are taken between rounds
        if self._touched or self._groups:
            raise InvariantError("cannot snapshot a TC scheme mid-round")
        rows = [
            (n.id, n.lo, n.tin_lo, n.In, n.members, n.selfloop,
             index[n.tree_parent] if n.tree_parent is not None else -1,
             [index[v] for v in n.succ])
            for n in nodes
        ]
        state = {k: v for k, v in self.__dict__.items() if k not in ("_L", "_node_of", "_touched", "_groups", "registry")}
        state["_rows"] = rows
        return state

    def __setstate__(self, state):
        rows = state.pop("_rows")
        self.__dict__.update(state)
        nodes = []
        for nid, lo, tin_lo, In, members, selfloop, _, _ in rows:
            n = SccNode(list(members))
            n.id, n.lo, n.tin_lo, n.In, n.selfloop = nid, lo, tin_lo, In, selfloop
            nodes.append(n)
        for n, row in zip(nodes, rows):
            parent, succ = row[6], row[7]
            n.tree_parent = nodes[parent] if parent >= 0 else None
            for k in succ:
                n.succ.add(nodes[k])
                nodes[k].pred.add(n)
        self._L = nodes
        self._node_of = {c: n for n in nodes for c in n.members}
        self._touched = set()
        self._groups = []
        self.registry = None


def _tarjan(vertices: list[int], adj: dict[int, list[int]]) -> list[list[int]]:
    """Iterative Tarjan; components come out sinks first."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            w = next(it, None)
            if w is not None:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                elif w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps
