"""Random instance generators: regular graphs and uniform hypergraph CSPs.

Sampling is reproducible: every draw comes from a named substream of the
64-bit seed (see rng module), with one substream per edge for the per-edge
choices, so results do not depend on evaluation order.
"""

from dataclasses import dataclass, field

from .graphs import graph_instance
from .relational import Instance, RelStructure, Signature
from .rng import stream


@dataclass
class GenConfig:
    """Knobs for sampling and for the structural checkers.

    Rationals are accepted anywhere a threshold appears; the experiment
    layer records every value next to the seed.
    """

    n: int = 0
    d: int = 0
    m: int = 0
    t: int = 3
    template: str = "nae3"
    seed: int = 0
    delta: object = None  # constraint density m/n
    ell: int = 1
    eps: object = None
    gamma: object = None
    s: int = 4
    mu: object = None
    zeta: object = None
    extra: dict = field(default_factory=dict)


def element_names(n, prefix="v"):
    width = max(1, len(str(n - 1))) if n else 1
    return tuple(f"{prefix}{i:0{width}d}" for i in range(n))


def template_nae3():
    """3-uniform not-all-equal over two values: lax and 1-null-constraining."""
    dom = ("0", "1")
    sig = Signature((("R", 3),))
    tuples = {
        t
        for t in (
            (a, b, c) for a in dom for b in dom for c in dom
        )
        if len(set(t)) > 1
    }
    return RelStructure(sig, dom, {"R": tuples})


def builtin_template(name):
    """Built-in templates: 'nae3' and cliques 'k2', 'k3', 'k4'."""
    from .graphs import clique_template

    if name == "nae3":
        return template_nae3()
    if name.startswith("k") and name[1:].isdigit():
        c = int(name[1:])
        if c < 2:
            raise ValueError("clique template needs at least 2 vertices")
        return clique_template(c)
    raise ValueError(f"unknown builtin template {name!r}")


def sample_regular_graph(n, d, seed, max_attempts=5000):
    """A uniform simple d-regular graph by pairing stubs with rejection.

    Each attempt shuffles the dn stubs on its own substream and pairs them
    up; attempts with loops or parallel edges are rejected wholesale, which
    conditions the pairing model on simplicity.
    """
    if (n * d) % 2 != 0:
        raise ValueError("n*d must be even for a d-regular graph")
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")
    names = element_names(n)
    for attempt in range(max_attempts):
        gen = stream(seed, "regular", n, d, attempt)
        stubs = [i for i in range(n) for _ in range(d)]
        perm = gen.permutation(len(stubs))
        shuffled = [stubs[int(i)] for i in perm]
        edges = set()
        ok = True
        for a, b in zip(shuffled[::2], shuffled[1::2]):
            if a == b:
                ok = False
                break
            key = (min(a, b), max(a, b))
            if key in edges:
                ok = False
                break
            edges.add(key)
        if ok:
            return graph_instance(
                names, [(names[a], names[b]) for a, b in sorted(edges)]
            )
    raise RuntimeError(
        f"regular graph sampling failed after {max_attempts} attempts"
    )


def sample_csp_instance(n, m, T, seed, max_attempts_factor=400):
    """An instance from the random model: a uniform m-edge t-uniform
    hypergraph, then an independent uniform vertex order and relation symbol
    per edge.

    Edges are drawn as sorted t-sets with rejection of repeats; the per-edge
    order and symbol come from the substream ("edge", i).
    """
    t = T.signature.uniform_arity
    if t is None:
        raise ValueError("template must be uniform")
    from math import comb

    if m > comb(n, t):
        raise ValueError(f"cannot place {m} distinct edges on {n} vertices")
    names = element_names(n)
    gen = stream(seed, "edges")
    chosen = []
    seen = set()
    budget = max_attempts_factor * (m + 10)
    while len(chosen) < m:
        budget -= 1
        if budget < 0:
            raise RuntimeError("edge rejection sampling budget exhausted")
        pick = tuple(sorted(int(x) for x in gen.choice(n, size=t, replace=False)))
        if pick in seen:
            continue
        seen.add(pick)
        chosen.append(pick)
    symbols = [name for name, _ in T.signature.symbols]
    rels = {name: [] for name in symbols}
    for i, edge in enumerate(chosen):
        egen = stream(seed, "edge", i)
        perm = [int(x) for x in egen.permutation(t)]
        symbol = symbols[int(egen.integers(len(symbols)))]
        rels[symbol].append(tuple(names[edge[j]] for j in perm))
    return Instance(T.signature, names, rels)


def degree_audit(A):
    """Vertex degrees of a binary instance; raises on non-graph input."""
    from .graphs import degree_histogram

    return degree_histogram(A)
