"""Directed graph model of a unidirectional network.

Processes are dense integers ``0..n-1``.  An edge ``(i, j)`` means ``j`` reads
the variables of ``i``: ``i`` is a predecessor of ``j``.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

INF = math.inf


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: frozenset
    preds: tuple = field(init=False, repr=False, compare=False)
    succs: tuple = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("process count must be non-negative")
        edges = frozenset((int(u), int(v)) for u, v in edges)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on process {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {u}->{v} outside 0..{n - 1}")
        preds = [[] for _ in range(n)]
        succs = [[] for _ in range(n)]
        for u, v in sorted(edges):
            succs[u].append(v)
            preds[v].append(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "preds", tuple(tuple(p) for p in preds))
        object.__setattr__(self, "succs", tuple(tuple(s) for s in succs))

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> frozenset:
        return frozenset(self.preds[i]) | frozenset(self.succs[i])

    def max_degree(self) -> int:
        return max((len(self.neighbors(i)) for i in range(self.n)), default=0)

    def ancestors(self, i: int) -> frozenset:
        return frozenset(v for v in _bfs(self.preds, i) if v != i)

    def __iter__(self):
        return iter(range(self.n))

    def __len__(self):
        return self.n


def _bfs(adj, src):
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def distances_from(g: Digraph, i: int) -> list:
    """Shortest directed path lengths from ``i`` to every process (``INF`` if unreachable)."""
    reach = _bfs(g.succs, i)
    return [reach.get(j, INF) for j in range(g.n)]


def distances_to(g: Digraph, i: int) -> list:
    reach = _bfs(g.preds, i)
    return [reach.get(j, INF) for j in range(g.n)]


def distance(g: Digraph, i: int, j: int):
    if not (0 <= i < g.n and 0 <= j < g.n):
        raise IndexError("process outside graph")
    return distances_from(g, i)[j]


def diameter(g: Digraph) -> int:
    if g.n == 0:
        raise ValueError("diameter of an empty graph")
    best = 0
    for i in range(g.n):
        for d in distances_from(g, i):
            if d != INF and d > best:
                best = d
    return best


def strongly_connected_components(g: Digraph) -> list:
    """Tarjan's algorithm, iterative.  Components come out in reverse topological order."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    for root in range(g.n):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = g.succs[v]
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                if w not in index:
                    work.append((v, pos))
                    work.append((w, 0))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(frozenset(comp))
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
    return comps


@dataclass(frozen=True)
class Condensation:
    components: tuple       # frozensets of processes, topologically ordered
    component_of: tuple     # process -> index into components
    dag: frozenset          # (component, component) edges
    sources: tuple          # indices of components with in-degree 0

    def component(self, i: int) -> frozenset:
        return self.components[self.component_of[i]]


def condense(g: Digraph) -> Condensation:
    comps = list(reversed(strongly_connected_components(g)))
    comp_of = [0] * g.n
    for k, c in enumerate(comps):
        for v in c:
            comp_of[v] = k
    dag = frozenset((comp_of[u], comp_of[v]) for u, v in g.edges if comp_of[u] != comp_of[v])
    targets = {b for _, b in dag}
    sources = tuple(k for k in range(len(comps)) if k not in targets)
    return Condensation(tuple(comps), tuple(comp_of), dag, sources)


def is_strongly_connected(g: Digraph) -> bool:
    return g.n > 0 and len(strongly_connected_components(g)) == 1


# -- generators ---------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSpec:
    """A named graph family with its parameters.

    ``kind`` is one of ``cycle``, ``path``, ``random``, ``scc``, ``cliques``,
    ``fixture`` or ``file``.
    """

    kind: str
    params: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        """Parse ``kind:arg:arg`` strings such as ``random:10:0.2`` or ``cliques:3,2,4``."""
        kind, _, rest = text.partition(":")
        args = rest.split(":") if rest else []
        try:
            if kind in ("cycle", "path"):
                (n,) = args
                return cls(kind, (int(n),))
            if kind == "random":
                n, p = args
                return cls(kind, (int(n), float(p)))
            if kind == "scc":
                n, extra = args
                return cls(kind, (int(n), int(extra)))
            if kind == "cliques":
                (shape,) = args
                return cls(kind, tuple(int(s) for s in shape.split(",")))
            if kind == "fixture":
                (name,) = args
                return cls(kind, (name,))
            if kind == "file":
                return cls(kind, (rest,))
        except ValueError as exc:
            raise ValueError(f"bad graph spec {text!r}: {exc}") from None
        raise ValueError(f"unknown graph spec {text!r}")

    def __str__(self):
        if self.kind == "cliques":
            return "cliques:" + ",".join(map(str, self.params))
        return ":".join([self.kind, *map(str, self.params)])


def directed_cycle(n: int) -> Digraph:
    _check_n(n)
    if n == 1:
        return Digraph(1)
    return Digraph(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Digraph:
    _check_n(n)
    return Digraph(n, ((i, i + 1) for i in range(n - 1)))


def random_digraph(n: int, p: float, rng: random.Random) -> Digraph:
    _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    return Digraph(n, ((u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p))


def random_strongly_connected(n: int, extra: int, rng: random.Random) -> Digraph:
    """A random Hamiltonian cycle plus ``extra`` further random edges."""
    _check_n(n)
    if extra < 0:
        raise ValueError("extra edge count must be non-negative")
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    if n > 1:
        edges = {(order[k], order[(k + 1) % n]) for k in range(n)}
    free = [(u, v) for u in range(n) for v in range(n) if u != v and (u, v) not in edges]
    edges.update(rng.sample(free, min(extra, len(free))))
    g = Digraph(n, edges)
    assert is_strongly_connected(g)
    return g


def dag_of_cliques(shape, rng: random.Random) -> Digraph:
    """Complete bidirectional cliques of the given sizes, joined into a random DAG.

    Every clique after the first receives one edge from a random process of a
    random earlier clique, plus each other earlier clique contributes an edge
    with probability 1/2.
    """
    if not shape or any(s <= 0 for s in shape):
        raise ValueError("clique sizes must be positive")
    blocks = []
    start = 0
    for size in shape:
        blocks.append(list(range(start, start + size)))
        start += size
    edges = {(u, v) for b in blocks for u in b for v in b if u != v}
    for k in range(1, len(blocks)):
        parents = {rng.randrange(k)} | {j for j in range(k) if rng.random() < 0.5}
        for j in sorted(parents):
            edges.add((rng.choice(blocks[j]), rng.choice(blocks[k])))
    return Digraph(start, edges)


def _check_n(n):
    if n <= 0:
        raise ValueError("graph must have at least one process")


def generate(spec: GeneratorSpec | str, seed=0) -> Digraph:
    if isinstance(spec, str):
        spec = GeneratorSpec.parse(spec)
    rng = random.Random(seed)
    kind, params = spec.kind, spec.params
    if kind == "cycle":
        return directed_cycle(*params)
    if kind == "path":
        return path(*params)
    if kind == "random":
        return random_digraph(params[0], params[1], rng)
    if kind == "scc":
        return random_strongly_connected(params[0], params[1], rng)
    if kind == "cliques":
        return dag_of_cliques(params, rng)
    if kind == "fixture":
        from umisim import impossibility

        fixtures = {"system-a": impossibility.system_a, "system-b": impossibility.system_b}
        if params[0] not in fixtures:
            raise ValueError(f"unknown fixture {params[0]!r}")
        return fixtures[params[0]]()
    if kind == "file":
        with open(params[0]) as fh:
            return loads(fh.read())
    raise ValueError(f"unknown generator {kind!r}")


# -- serialization ------------------------------------------------------------


def dumps(g: Digraph) -> str:
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Digraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph text")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise ValueError(f"bad header line {lines[0]!r}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Digraph(int(head[1]), edges)
