"""Exact graph coloring by branch and bound with saturation ordering."""


def greedy_clique(adj, order=None):
    """A maximal clique found greedily; a cheap chromatic lower bound."""
    vertices = sorted(adj, key=lambda v: -len(adj[v])) if order is None else list(order)
    clique = []
    for v in vertices:
        if all(v in adj[u] for u in clique):
            clique.append(v)
    return clique


def is_colorable(adj, c, node_budget=2_000_000):
    """Exact c-colorability with a proper coloring witness.

    Returns (verdict, coloring) where the verdict is True/False or None when
    the node budget runs out.  Branches on a most-saturated vertex and tries
    only colors up to one past the current maximum, which prunes color
    symmetries.
    """
    vertices = sorted(adj, key=lambda v: (-len(adj[v]), v))
    if not vertices:
        return True, {}
    color = {}
    nodes = 0

    def pick():
        best = None
        best_key = None
        for v in vertices:
            if v in color:
                continue
            sat = len({color[u] for u in adj[v] if u in color})
            key = (-sat, -len(adj[v]), v)
            if best is None or key < best_key:
                best, best_key = v, key
        return best

    def search(used):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise TimeoutError
        if len(color) == len(vertices):
            return True
        v = pick()
        banned = {color[u] for u in adj[v] if u in color}
        for col in range(min(used + 1, c)):
            if col in banned:
                continue
            color[v] = col
            if search(max(used, col + 1)):
                return True
            del color[v]
        return False

    try:
        ok = search(0)
    except TimeoutError:
        return None, None
    return (True, dict(color)) if ok else (False, None)


def chromatic_number(adj, node_budget=2_000_000):
    """Exact chromatic number: (value, status, witness coloring).

    Status is "exact" or "unverified" when a colorability probe hits its
    budget.  An empty graph has chromatic number 0 by convention.
    """
    if not adj:
        return 0, "exact", {}
    if all(not nb for nb in adj.values()):
        return 1, "exact", {v: 0 for v in adj}
    lower = max(2, len(greedy_clique(adj)))
    for c in range(lower, len(adj) + 1):
        verdict, coloring = is_colorable(adj, c, node_budget)
        if verdict is None:
            return None, "unverified", None
        if verdict:
            return c, "exact", coloring
    raise AssertionError("a graph is always |V|-colorable")


def vertex_order_by_coloring(adj, input_order, node_budget=2_000_000):
    """Vertices grouped by the color classes of an exact proper coloring.

    Ties inside a class follow the input order.  Returns (order, coloring,
    chromatic_number); raises if the coloring search is unverified.
    """
    chi, status, coloring = chromatic_number(adj, node_budget)
    if status != "exact":
        raise TimeoutError("chromatic number search exhausted its budget")
    rank = {v: i for i, v in enumerate(input_order)}
    order = sorted(adj, key=lambda v: (coloring[v], rank[v]))
    return order, coloring, chi
