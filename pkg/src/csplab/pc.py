"""Degree-bounded polynomial calculus derivability by exact linear algebra.

With the Boolean axioms present, a degree-D derivation of 1 exists iff 1 lies
in the smallest subspace of multilinear polynomials of degree at most D that
contains the multilinearized axioms of degree at most D and is closed under
multiplying by a variable, multilinearizing, and keeping the product only if
its degree stays within D.  The subspace is grown as a row-reduced basis over
exact rationals, pivoting on the lex-largest monomial.

Degree convention: axioms count toward the bound, and bounds start at D = 1,
so a constant axiom yields minimum refutation degree 1.
"""

from dataclasses import dataclass

from .ideal import MONO_ONE, LexOrder, Monomial


@dataclass
class DerivabilityQuery:
    axioms: tuple
    degree: int
    order: LexOrder
    excluded: tuple = ()  # axioms over the degree bound, kept for reporting


def prepare_query(axioms, degree, order):
    """Multilinearize axioms; exclude (with a note) those over the bound."""
    kept = []
    excluded = []
    for p in axioms:
        q = p.multilinearize()
        if not q:
            continue
        if q.degree > degree:
            excluded.append(p)
        else:
            kept.append(q)
    return DerivabilityQuery(tuple(kept), degree, order, tuple(excluded))


class _EchelonBasis:
    """Row-reduced polynomial basis keyed by leading monomial."""

    def __init__(self, order):
        self.order = order
        self.rows = {}  # leading monomial -> polynomial with that lead, coef 1

    def reduce(self, p):
        while p:
            lead = self.order.leading_monomial(p)
            row = self.rows.get(lead)
            if row is None:
                return p
            p = p - row.scale(p.coefficient(lead))
        return p

    def insert(self, p):
        """Reduce p against the basis; add the remainder if nonzero."""
        p = self.reduce(p)
        if not p:
            return None
        lead = self.order.leading_monomial(p)
        p = p.scale(1 / p.coefficient(lead))
        self.rows[lead] = p
        return p

    def __len__(self):
        return len(self.rows)

    def contains_one(self):
        return MONO_ONE in self.rows


def pc_derivable_in_degree(axioms, degree, order, basis_budget=200000):
    """True iff 1 is derivable from the axioms in degree at most ``degree``.

    Returns True/False, or None ("unverified") if the basis budget runs out.
    The axioms must include the Boolean axioms for the multilinear closure to
    coincide with polynomial calculus derivability.
    """
    query = prepare_query(axioms, degree, order)
    basis = _EchelonBasis(order)
    queue = []
    for p in query.axioms:
        added = basis.insert(p)
        if added is not None:
            queue.append(added)
    while queue:
        if basis.contains_one():
            return True
        if len(basis) > basis_budget:
            return None
        p = queue.pop()
        for var in order.vars_desc:
            q = p.mul_monomial(Monomial.from_vars([var])).multilinearize()
            if q.degree > degree:
                continue
            added = basis.insert(q)
            if added is not None:
                queue.append(added)
    return basis.contains_one()


def min_refutation_degree(axioms, max_degree, order, basis_budget=200000):
    """Least D <= max_degree with a degree-D derivation of 1, else None.

    Returns (degree, "exact") on success, (None, "> max_degree") if no bound
    within range, or (None, "unverified") if a budget ran out first.
    """
    for D in range(1, max_degree + 1):
        verdict = pc_derivable_in_degree(axioms, D, order, basis_budget)
        if verdict is None:
            return None, "unverified"
        if verdict:
            return D, "exact"
    return None, f"> {max_degree}"
