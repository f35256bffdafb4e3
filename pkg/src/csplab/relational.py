"""Finite relational structures, substructures, and partial homomorphisms.

Element ids are opaque strings.  All deterministic orders (enumeration order,
serialization) derive from the input ordering of ``domain`` and the template
domain; canonical JSON output sorts domains and tuples.
"""

from dataclasses import dataclass, field
import json

from .errors import HomBudgetExceeded

DEFAULT_HOM_CAP = 10**6


@dataclass(frozen=True)
class Signature:
    """A finite set of relation symbols with positive arities."""

    symbols: tuple  # of (name, arity)

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation symbol names")
        for name, arity in self.symbols:
            if arity < 1:
                raise ValueError(f"symbol {name!r} has arity {arity} < 1")

    def arity(self, name):
        for sym, ar in self.symbols:
            if sym == name:
                return ar
        raise KeyError(name)

    def names(self):
        return [name for name, _ in self.symbols]

    @property
    def uniform_arity(self):
        """Common arity of all symbols, or None if arities differ."""
        arities = {ar for _, ar in self.symbols}
        return arities.pop() if len(arities) == 1 else None


@dataclass(frozen=True)
class RelStructure:
    """A finite structure: ordered domain plus one tuple set per symbol."""

    signature: Signature
    domain: tuple
    relations: dict = field(compare=False)

    def __post_init__(self):
        dom = set(self.domain)
        if len(dom) != len(self.domain):
            raise ValueError("domain contains repeated element ids")
        rels = {}
        for name, arity in self.signature.symbols:
            tuples = frozenset(tuple(t) for t in self.relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {name!r}")
                for x in t:
                    if x not in dom:
                        raise ValueError(f"tuple {t} mentions unknown element {x!r}")
            rels[name] = tuples
        object.__setattr__(self, "relations", rels)

    def __eq__(self, other):
        if not isinstance(other, RelStructure):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.domain == other.domain
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash(
            (
                self.signature,
                self.domain,
                tuple(sorted((k, tuple(sorted(v))) for k, v in self.relations.items())),
            )
        )

    def domain_index(self):
        return {x: i for i, x in enumerate(self.domain)}

    def all_tuples(self):
        """Iterate (symbol, tuple) pairs in deterministic order."""
        for name, _ in self.signature.symbols:
            for t in sorted(self.relations[name]):
                yield name, t


class Instance(RelStructure):
    """A CSP instance: a structure whose tuples never repeat an element."""

    def __post_init__(self):
        super().__post_init__()
        for name, tuples in self.relations.items():
            for t in tuples:
                if len(set(t)) != len(t):
                    raise ValueError(
                        f"instance tuple {t} in {name!r} repeats an element"
                    )


@dataclass(frozen=True)
class PartialHom:
    """A partial map from instance elements to template elements.

    The domain is stored sorted so equal maps compare and hash equal.
    """

    items: tuple  # of (element, value), sorted by element

    @classmethod
    def from_dict(cls, mapping):
        return cls(tuple(sorted(mapping.items())))

    @property
    def domain_set(self):
        return frozenset(x for x, _ in self.items)

    def as_dict(self):
        return dict(self.items)

    def __getitem__(self, element):
        for x, v in self.items:
            if x == element:
                return v
        raise KeyError(element)

    def __len__(self):
        return len(self.items)

    def restrict(self, Y):
        Y = frozenset(Y)
        missing = Y - self.domain_set
        if missing:
            raise ValueError(f"restriction target not inside domain: {sorted(missing)}")
        return PartialHom(tuple((x, v) for x, v in self.items if x in Y))


EMPTY_HOM = PartialHom(())


def restrict(phi, Y):
    """The restriction of ``phi`` to ``Y`` (which must lie in its domain)."""
    return phi.restrict(Y)


def extends(psi, phi):
    """True iff psi's domain contains phi's and the two agree on it."""
    if not phi.domain_set <= psi.domain_set:
        return False
    mapping = psi.as_dict()
    return all(mapping[x] == v for x, v in phi.items)


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset
    edges: frozenset  # of frozensets

    def __post_init__(self):
        for e in self.edges:
            if not e <= self.vertices:
                raise ValueError(f"edge {sorted(e)} leaves the vertex set")

    def is_uniform(self, t):
        return all(len(e) == t for e in self.edges)

    def degree(self, v, edge_subset=None):
        edges = self.edges if edge_subset is None else edge_subset
        return sum(1 for e in edges if v in e)


def induced_substructure(S, X):
    """The substructure of S on X: exactly the tuples lying inside X."""
    X = frozenset(X)
    unknown = X - set(S.domain)
    if unknown:
        raise ValueError(f"unknown element ids: {sorted(unknown)}")
    dom = tuple(x for x in S.domain if x in X)
    rels = {
        name: [t for t in tuples if all(x in X for x in t)]
        for name, tuples in S.relations.items()
    }
    return type(S)(S.signature, dom, rels)


def is_homomorphism(phi, A, T):
    """Check phi against the tuples of A fully inside its domain.

    This is exactly the homomorphism condition for ``A[dom(phi)] -> T``.
    """
    dom = phi.domain_set
    if not dom <= set(A.domain):
        raise ValueError("partial hom domain leaves the instance domain")
    mapping = phi.as_dict()
    tdom = set(T.domain)
    if not set(mapping.values()) <= tdom:
        raise ValueError("partial hom image leaves the template domain")
    for name, tuples in A.relations.items():
        target = T.relations[name]
        for t in tuples:
            if all(x in dom for x in t):
                if tuple(mapping[x] for x in t) not in target:
                    return False
    return True


def _tuples_inside(A, X):
    """Tuples of A[X], grouped for the backtracking search."""
    out = []
    for name, tuples in A.relations.items():
        for t in tuples:
            if all(x in X for x in t):
                out.append((name, t))
    return out


def enumerate_homs(A, T, X, cap=DEFAULT_HOM_CAP, pins=None, first_only=False,
                   node_budget=None):
    """All homomorphisms ``A[X] -> T`` in deterministic order.

    Elements are assigned in A's domain order, values tried in T's domain
    order, so the output order is lexicographic in (element, value) input
    positions.  ``pins`` fixes values for some elements of X up front.

    Raises HomBudgetExceeded once more than ``cap`` results accumulate or
    the search visits more than ``node_budget`` nodes.
    """
    X = frozenset(X)
    unknown = X - set(A.domain)
    if unknown:
        raise ValueError(f"unknown element ids: {sorted(unknown)}")
    pins = dict(pins or {})
    order = [x for x in A.domain if x in X]
    values = list(T.domain)
    tuples = _tuples_inside(A, X)
    nodes = 0
    by_element = {x: [] for x in order}
    for name, t in tuples:
        for x in t:
            by_element[x].append((name, t))
    target = {name: T.relations[name] for name in A.relations}

    results = []
    assignment = {}

    def consistent_after(x):
        # Check only tuples through x whose elements are all assigned.
        for name, t in by_element[x]:
            img = []
            for y in t:
                v = assignment.get(y)
                if v is None:
                    break
                img.append(v)
            else:
                if tuple(img) not in target[name]:
                    return False
        return True

    def forward_ok(pos):
        # Forward checking: every tuple with one unassigned element must
        # still admit some value for it.
        for name, t in tuples:
            holes = [y for y in t if y not in assignment]
            if len(holes) != 1:
                continue
            y = holes[0]
            ok = False
            for v in values:
                assignment[y] = v
                img = tuple(assignment[z] for z in t)
                del assignment[y]
                if img in target[name]:
                    ok = True
                    break
            if not ok:
                return False
        return True

    def search(pos):
        nonlocal nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise HomBudgetExceeded(
                f"search visited more than {node_budget} nodes", node_budget=node_budget
            )
        if pos == len(order):
            results.append(PartialHom(tuple(sorted(assignment.items()))))
            if len(results) > cap:
                raise HomBudgetExceeded(
                    f"more than {cap} homomorphisms on X of size {len(X)}",
                    cap=cap,
                )
            return not first_only
        x = order[pos]
        candidates = [pins[x]] if x in pins else values
        for v in candidates:
            assignment[x] = v
            if consistent_after(x) and forward_ok(pos):
                if not search(pos + 1):
                    del assignment[x]
                    return False
            del assignment[x]
        return True

    search(0)
    return results


def constraint_components(A):
    """Domain partition into connected components of the constraint graph."""
    parent = {v: v for v in A.domain}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for _, t in A.all_tuples():
        base = find(t[0])
        for x in t[1:]:
            parent[find(x)] = base
    groups = {}
    for v in A.domain:
        groups.setdefault(find(v), []).append(v)
    return [tuple(g) for g in groups.values()]


class GlobalHomFinder:
    """Component-wise search for homomorphisms extending given pins.

    The constraint graph splits into components that can be solved
    independently; unpinned components reuse a cached base solution.  This
    keeps extension queries cheap on sparse instances and avoids exponential
    thrash from free vertices when a pinned component is unsatisfiable.
    """

    def __init__(self, A, T, hom_cap=DEFAULT_HOM_CAP, node_budget=500_000):
        self.A = A
        self.T = T
        self.hom_cap = hom_cap
        self.node_budget = node_budget
        self.components = constraint_components(A)
        self._where = {}
        for idx, comp in enumerate(self.components):
            for v in comp:
                self._where[v] = idx
        self._base = {}
        self.satisfiable = True
        for idx, comp in enumerate(self.components):
            sol = self._solve(comp, {})
            if sol is None:
                self.satisfiable = False
                break
            self._base[idx] = sol

    def _solve(self, comp, pins):
        found = enumerate_homs(
            self.A,
            self.T,
            comp,
            cap=self.hom_cap,
            pins=pins,
            first_only=True,
            node_budget=self.node_budget,
        )
        return found[0].as_dict() if found else None

    def find(self, pins=None):
        """A homomorphism A -> T extending ``pins``, or None.

        Raises HomBudgetExceeded if a component search blows its budget.
        """
        if not self.satisfiable:
            return None
        pins = dict(pins or {})
        touched = {}
        for v, val in pins.items():
            touched.setdefault(self._where[v], {})[v] = val
        mapping = {}
        for idx, comp in enumerate(self.components):
            if idx in touched:
                sol = self._solve(comp, touched[idx])
                if sol is None:
                    return None
                mapping.update(sol)
            else:
                mapping.update(self._base[idx])
        return PartialHom(tuple(sorted(mapping.items())))


def hypergraph_of(A):
    """The hypergraph induced by a uniform instance: one edge per tuple set."""
    t = A.signature.uniform_arity
    if t is None:
        raise ValueError("signature is not uniform; no induced hypergraph")
    edges = set()
    for _, tup in A.all_tuples():
        edges.add(frozenset(tup))
    return Hypergraph(frozenset(A.domain), frozenset(edges))


def structure_to_json(S):
    """Canonical JSON text: sorted domain, sorted tuples."""
    payload = {
        "signature": [
            {"name": name, "arity": arity} for name, arity in S.signature.symbols
        ],
        "domain": sorted(S.domain),
        "relations": {
            name: sorted([list(t) for t in tuples])
            for name, tuples in sorted(S.relations.items())
        },
    }
    return json.dumps(payload, sort_keys=True)


def structure_from_json(text, instance=False):
    payload = json.loads(text)
    sig = Signature(tuple((s["name"], s["arity"]) for s in payload["signature"]))
    cls = Instance if instance else RelStructure
    return cls(
        sig,
        tuple(payload["domain"]),
        {name: [tuple(t) for t in tuples] for name, tuples in payload["relations"].items()},
    )
