"""Deterministic benchmark graphs, emitted as fact text or as edge lists."""
from __future__ import annotations

import random
from typing import Iterable


def chain_edges(n: int) -> list[tuple[str, str]]:
    """Edges ``(a_{i+1}, a_i)`` for ``1 <= i < n``."""
    if n < 1:
        raise ValueError("chain length must be at least 1")
    return [(f"a{i + 1}", f"a{i}") for i in range(1, n)]


def dag_edges(nodes: int, edges: int, seed: int = 0) -> list[tuple[str, str]]:
    """Distinct forward pairs under a random topological order."""
    if nodes < 1 or edges < 0:
        raise ValueError("need nodes >= 1 and edges >= 0")
    most = nodes * (nodes - 1) // 2
    if edges > most:
        raise ValueError(f"a DAG on {nodes} nodes has at most {most} edges")
    rng = random.Random(seed)
    order = list(range(nodes))
    rng.shuffle(order)
    chosen: set[tuple[int, int]] = set()
    if edges > most // 2:
        # dense: sample from the full pair list instead of rejecting
        pairs = [(i, j) for i in range(nodes) for j in range(i + 1, nodes)]
        chosen = set(rng.sample(pairs, edges))
    else:
        while len(chosen) < edges:
            i, j = rng.randrange(nodes), rng.randrange(nodes)
            if i != j:
                chosen.add((min(i, j), max(i, j)))
    out = sorted(chosen)
    rng.shuffle(out)
    return [(f"n{order[i]}", f"n{order[j]}") for i, j in out]


def layered_edges(
    layers: int, width: int, p_forward: float = 0.3, p_back: float = 0.2, seed: int = 0
) -> list[tuple[str, str]]:
    """Layered DAG plus back-edges with probability ``p_back`` to induce cycles."""
    if layers < 1 or width < 1:
        raise ValueError("need layers >= 1 and width >= 1")
    rng = random.Random(seed)
    name = lambda l, k: f"v{l}_{k}"
    out = []
    for l in range(layers - 1):
        for a in range(width):
            targets = [b for b in range(width) if rng.random() < p_forward]
            if not targets:
                targets = [rng.randrange(width)]
            out.extend((name(l, a), name(l + 1, b)) for b in targets)
    forward = list(out)
    for u, v in forward:
        if rng.random() < p_back:
            out.append((v, u))
    return out


def random_graph_edges(nodes: int, edges: int, seed: int = 0) -> list[tuple[str, str]]:
    """Distinct directed pairs (self-loops excluded); cycles allowed."""
    if edges > nodes * (nodes - 1):
        raise ValueError("too many edges for a simple digraph")
    rng = random.Random(seed)
    chosen: dict[tuple[int, int], None] = {}
    while len(chosen) < edges:
        i, j = rng.randrange(nodes), rng.randrange(nodes)
        if i != j:
            chosen.setdefault((i, j))
    return [(f"g{i}", f"g{j}") for i, j in chosen]


def to_fact_text(edges: Iterable[tuple[str, str]], pred: str = "R") -> str:
    return "".join(f"{pred}({a},{b}).\n" for a, b in edges)


def to_tsv(edges: Iterable[tuple[str, str]], pred: str = "R") -> str:
    return "".join(f"{pred}\t{a}\t{b}\n" for a, b in edges)


def gen_chain(n: int, pred: str = "R") -> str:
    return to_fact_text(chain_edges(n), pred)


def gen_dag(nodes: int, edges: int, seed: int = 0, pred: str = "R") -> str:
    return to_fact_text(dag_edges(nodes, edges, seed), pred)


def gen_layered(layers: int, width: int, p_back: float = 0.2, seed: int = 0, pred: str = "R") -> str:
    return to_fact_text(layered_edges(layers, width, p_back=p_back, seed=seed), pred)


def edge_facts(edges: Iterable[tuple[str, str]], symbols, pred: str = "R") -> list[tuple]:
    """Intern an edge list straight into fact tuples (skips text parsing)."""
    R = symbols.predicate(pred, 2)
    const = symbols.constant
    return [(R, const(a), const(b)) for a, b in edges]
