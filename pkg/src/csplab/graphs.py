"""Small helpers for graphs represented as symmetric binary instances."""

from .relational import Instance, RelStructure, Signature

GRAPH_SIGNATURE = Signature((("E", 2),))


def graph_instance(vertices, edges):
    """A graph as an instance with a symmetric binary relation."""
    tuples = set()
    for u, v in edges:
        if u == v:
            raise ValueError(f"loop at {u!r}")
        tuples.add((u, v))
        tuples.add((v, u))
    return Instance(GRAPH_SIGNATURE, tuple(vertices), {"E": tuples})


def clique_template(c):
    """The complete loopless template on c named vertices."""
    dom = tuple(str(i) for i in range(c))
    tuples = {(u, v) for u in dom for v in dom if u != v}
    return RelStructure(GRAPH_SIGNATURE, dom, {"E": tuples})


def adjacency(A):
    """Adjacency sets of a binary instance, symmetrized."""
    arity = A.signature.uniform_arity
    if arity != 2:
        raise ValueError("adjacency is defined for binary structures only")
    adj = {v: set() for v in A.domain}
    for _, (u, v) in A.all_tuples():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def edge_set(A):
    """Undirected edges of a binary instance as frozensets."""
    return {frozenset(t) for _, t in A.all_tuples()}


def degree_histogram(A):
    adj = adjacency(A)
    return {v: len(nb) for v, nb in adj.items()}
