"""Local pseudo-reduction operators and their verification suite.

The operator sends a monomial to its reduction modulo the vanishing ideal of
the homomorphism set of the closed substructure around it, extended linearly.
Verification checks the operator identities (unit, axioms to zero, commuting
with variable multiplication through the operator), the satisfiability and
reducibility conditions of the closure, integrality, the polynomial form of
the marginal-system identities, and produces explicit integer solutions by
evaluation at extending homomorphisms.
"""

from dataclasses import dataclass, field
import itertools

from . import closure as closure_mod
from .errors import ClosureOverflow
from .hierarchy import ConsistencyFamily, build_Lk, family_invariant_violations, subsets_up_to
from .ideal import (
    MONO_ONE,
    Monomial,
    Polynomial,
    hom_point_set,
    lex_reducible,
    oracle_reduce,
    reduce as reduce_mono,
)
from .relational import enumerate_homs
from .rng import stream


# ---------------------------------------------------------------------------
# Closure operators


class GraphClosure:
    """Vertex closure driven by descendants, short hops, and lassos."""

    def __init__(self, config, D):
        self.config = config
        self.D = D

    def __call__(self, X):
        return closure_mod.graph_closure(self.config, frozenset(X))


class BwClosure:
    """Local closure over the instance's hypergraph."""

    def __init__(self, config, D):
        self.config = config
        self.D = D

    def __call__(self, X):
        return closure_mod.bw_closure(self.config, frozenset(X))


class IdentityClosure:
    def __init__(self, D):
        self.D = D

    def __call__(self, X):
        return frozenset(X)


class GlobalClosure:
    """cl(X) = the whole domain; exact when the instance is satisfiable."""

    def __init__(self, A, D):
        self.domain = frozenset(A.domain)
        self.D = D

    def __call__(self, X):
        return self.domain


def check_closure_axioms(cl, sample_sets, pair_samples=64, seed=0):
    """Self-containment, monotonicity on sampled pairs, and idempotence.

    ``sample_sets`` is an iterable of vertex sets; monotone pairs are drawn
    among comparable sampled sets plus random subset pairs.
    """
    sample_sets = [frozenset(s) for s in sample_sets]
    failures = []
    closures = {}
    for s in sample_sets:
        c = cl(s)
        closures[s] = c
        if not s <= c:
            failures.append(("self-containment", sorted(s)))
        if cl(c) != c:
            failures.append(("idempotence", sorted(s)))
    gen = stream(seed, "closure-monotonicity")
    pool = sorted(sample_sets, key=sorted)
    for _ in range(pair_samples):
        if not pool:
            break
        big = pool[int(gen.integers(len(pool)))]
        if not big:
            continue
        members = sorted(big)
        keep = gen.integers(2, size=len(members))
        small = frozenset(v for v, k in zip(members, keep) if k)
        if not cl(small) <= closures.get(big, cl(big)):
            failures.append(("monotonicity", sorted(small), sorted(big)))
    return {"ok": not failures, "failures": failures, "checked": len(sample_sets)}


# ---------------------------------------------------------------------------
# The operator


class RopHandle:
    """Memoized local pseudo-reduction operator for one (instance, template).

    Caches the homomorphism point set per closed vertex set and the reduced
    polynomial per monomial; all cached outputs are integral by construction
    (the reduction layer hard-errors otherwise).
    """

    def __init__(self, A, T, closure, order, D, hom_cap=10**6):
        self.A = A
        self.T = T
        self.closure = closure
        self.order = order
        self.D = D
        self.hom_cap = hom_cap
        self._ideals = {}
        self._memo = {}
        self._closures = {}

    def closure_of_set(self, X):
        X = frozenset(X)
        hit = self._closures.get(X)
        if hit is None:
            hit = frozenset(self.closure(X))
            self._closures[X] = hit
        return hit

    def closure_of(self, m):
        return self.closure_of_set(m.elements())

    def ideal_for(self, X):
        X = frozenset(X)
        hit = self._ideals.get(X)
        if hit is None:
            hit = hom_point_set(self.A, self.T, X, self.order, cap=self.hom_cap)
            self._ideals[X] = hit
        return hit

    def apply_monomial(self, m):
        hit = self._memo.get(m)
        if hit is None:
            cl = self.closure_of(m)
            V = self.ideal_for(cl)
            hit = reduce_mono(V, m)
            self._memo[m] = hit
        return hit

    def apply(self, p):
        out = Polynomial.zero()
        for m, c in p.terms.items():
            out = out + self.apply_monomial(m).scale(c)
        return out

    def hom_monomial(self, phi):
        return Monomial.from_vars(list(phi.items))


def build_rop(A, T, closure, order, D, hom_cap=10**6):
    """Assemble the operator handle and sanity-check the unit value."""
    missing = {(a, i) for a in A.domain for i in T.domain} - set(order.vars_desc)
    if missing:
        raise ValueError(f"order misses variables, e.g. {sorted(missing)[:3]}")
    handle = RopHandle(A, T, closure, order, D, hom_cap)
    if handle.apply_monomial(MONO_ONE) != Polynomial.one():
        raise ValueError("operator does not map 1 to 1; closure of the empty set "
                         "is unsatisfiable")
    return handle


# ---------------------------------------------------------------------------
# Verification


@dataclass
class VerifyReport:
    name: str
    ok: bool
    checked: int = 0
    counterexamples: list = field(default_factory=list)
    unverified: list = field(default_factory=list)

    def as_json(self):
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "counterexamples": [repr(c) for c in self.counterexamples[:10]],
            "unverified": [repr(u) for u in self.unverified[:10]],
        }


def _all_monomials_of_degree(variables, degree):
    for combo in itertools.combinations(sorted(variables), degree):
        yield Monomial.from_vars(combo)


def verify_rop_properties(R, encoded, D, sample_budget=500, seed=0, pair_budget=200000):
    """The three operator identities, checked exactly.

    Identity products R(x*m) of degree up to D are swept fully while the
    pair count stays under ``pair_budget``; the top degree is sampled with
    ``sample_budget`` seeded pairs otherwise.  Closure overflows downgrade
    the verdict to unverified rather than failing.
    """
    variables = sorted({(a, i) for a in R.A.domain for i in R.T.domain})
    reports = []

    ok1 = R.apply_monomial(MONO_ONE) == Polynomial.one()
    reports.append(VerifyReport("unit", ok1, checked=1))

    axioms = [p for p in encoded.all_axioms() if p.degree <= D + 1]
    bad = []
    unverified = []
    for p in axioms:
        try:
            if R.apply(p) != Polynomial.zero():
                bad.append(p)
        except ClosureOverflow as exc:
            unverified.append((p, exc))
    reports.append(
        VerifyReport("axioms-to-zero", not bad and not unverified, len(axioms), bad, unverified)
    )

    def check_pair(var, m):
        lhs = R.apply_monomial(m.mul_var(var))
        rhs = R.apply(R.apply_monomial(m).mul_monomial(Monomial.from_vars([var])))
        return lhs == rhs

    pair_fail = []
    pair_unverified = []
    checked = 0
    for deg in range(0, D):
        monos = (
            [MONO_ONE]
            if deg == 0
            else list(_all_monomials_of_degree(variables, deg))
        )
        total_pairs = len(monos) * len(variables)
        if total_pairs <= pair_budget:
            pairs = ((v, m) for m in monos for v in variables)
        else:
            gen = stream(seed, "rop-pairs", deg)
            def sampled():
                for _ in range(sample_budget):
                    m = monos[int(gen.integers(len(monos)))]
                    v = variables[int(gen.integers(len(variables)))]
                    yield v, m
            pairs = sampled()
        for v, m in pairs:
            checked += 1
            try:
                if not check_pair(v, m):
                    pair_fail.append((v, m))
            except ClosureOverflow as exc:
                pair_unverified.append((v, m, exc))
    reports.append(
        VerifyReport(
            "multiplication-commutes",
            not pair_fail and not pair_unverified,
            checked,
            pair_fail,
            pair_unverified,
        )
    )
    return reports


def random_monomial(A, T, gen, max_degree):
    size = int(gen.integers(0, max_degree + 1))
    if size == 0:
        return MONO_ONE
    elements = [A.domain[int(i)] for i in gen.choice(len(A.domain), size=size, replace=False)]
    values = [T.domain[int(gen.integers(len(T.domain)))] for _ in elements]
    return Monomial.from_vars(list(zip(elements, values)))


def verify_conditions(A, T, closure, order, D, samples=100, seed=0, hom_cap=10**6):
    """The satisfiability and reducibility conditions on sampled monomials.

    Satisfiability: the closed substructure around each sampled monomial has
    a homomorphism.  Reducibility: for monomials m' over the closure of m,
    reducibility modulo the small ideal and modulo the large ideal agree.
    """
    gen = stream(seed, "conditions")
    sat_fail = []
    red_fail = []
    unverified = []
    checked_sat = 0
    checked_red = 0
    ideals = {}

    def ideal_for(X):
        X = frozenset(X)
        if X not in ideals:
            ideals[X] = hom_point_set(A, T, X, order, cap=hom_cap)
        return ideals[X]

    for _ in range(samples):
        m = random_monomial(A, T, gen, D)
        try:
            cl_m = frozenset(closure(m.elements()))
        except ClosureOverflow as exc:
            unverified.append((m, exc))
            continue
        checked_sat += 1
        if not enumerate_homs(A, T, cl_m, cap=hom_cap, first_only=True):
            sat_fail.append(m)
            continue
        V_big = ideal_for(cl_m)
        cl_vars = sorted((a, i) for a in cl_m for i in T.domain)
        for _ in range(3):
            if not cl_vars:
                break
            size = int(gen.integers(0, min(len(cl_vars), D + 2) + 1))
            if size == 0:
                mp = MONO_ONE
            else:
                picks = [cl_vars[int(j)] for j in gen.choice(len(cl_vars), size=size, replace=False)]
                mp = Monomial.from_vars(picks)
            try:
                cl_mp = frozenset(closure(mp.elements()))
            except ClosureOverflow as exc:
                unverified.append((mp, exc))
                continue
            if not cl_mp <= cl_m:
                # Monotonicity plus idempotence force containment; treat a
                # violation as a reducibility-condition failure witness.
                red_fail.append((m, mp, "closure not contained"))
                continue
            checked_red += 1
            small = lex_reducible(ideal_for(cl_mp), mp)
            big = lex_reducible(V_big, mp)
            if small != big:
                red_fail.append((m, mp, f"small={small} big={big}"))
    return [
        VerifyReport("satisfiability-condition", not sat_fail, checked_sat, sat_fail, unverified),
        VerifyReport("reducibility-condition", not red_fail, checked_red, red_fail),
    ]


def support_family(R, k, hom_cap=10**6, subsets=None):
    """The operator's support on partial homomorphisms, per subset."""
    keys = subsets if subsets is not None else subsets_up_to(R.A.domain, k)
    sets = {}
    for x in keys:
        kept = set()
        for phi in enumerate_homs(R.A, R.T, x, cap=hom_cap):
            if R.apply_monomial(R.hom_monomial(phi)):
                kept.add(phi)
        sets[x] = kept
    return ConsistencyFamily(min(k, len(R.A.domain)), sets)


def verify_Lk_polynomial(R, k, hom_cap=10**6, subsets=None):
    """The marginal identities as exact polynomial equations over the support.

    Covering: the reductions of the support monomials of every subset sum to
    1.  Marginals: summing reductions over extensions of psi gives the
    reduction of psi.  The support family must also be k-consistent.
    """
    kappa = support_family(R, k, hom_cap, subsets)
    counter = []
    checked = 0
    keys = kappa.subset_keys()
    for x in keys:
        total = Polynomial.zero()
        for phi in kappa.sets[x]:
            total = total + R.apply_monomial(R.hom_monomial(phi))
        checked += 1
        if total != Polynomial.one():
            counter.append(("covering", x))
        for y in _proper_subsets(x):
            if y not in kappa.sets:
                continue
            groups = {}
            for phi in kappa.sets[x]:
                groups.setdefault(phi.restrict(frozenset(y)), []).append(phi)
            for psi in kappa.sets[y]:
                lhs = Polynomial.zero()
                for phi in groups.get(psi, ()):
                    lhs = lhs + R.apply_monomial(R.hom_monomial(phi))
                checked += 1
                if lhs != R.apply_monomial(R.hom_monomial(psi)):
                    counter.append(("marginal", x, y, psi))
    violations = family_invariant_violations(kappa, R.A, R.T)
    if violations:
        counter.extend(("family", v[0], v[1]) for v in violations[:5])
    return VerifyReport("marginal-identities", not counter, checked, counter), kappa


def _proper_subsets(x):
    out = []
    for size in range(len(x)):
        out.extend(itertools.combinations(x, size))
    return out


def fooling_solution(R, k, X, phi, kappa=None, hom_cap=10**6):
    """An integer vector for the marginal system pinning phi to 1.

    Evaluates every support reduction at the indicator of a homomorphism on
    the closure of X that extends phi (it exists whenever the support family
    is consistent at the closure size).  Returns (solution, mu).
    """
    X = tuple(sorted(X))
    cl_X = R.closure_of_set(frozenset(X))
    found = enumerate_homs(
        R.A, R.T, cl_X, cap=hom_cap, pins=phi.as_dict(), first_only=True
    )
    if not found:
        raise ValueError(
            "no extension of phi on the closure; the operator is not "
            "consistent at this degree"
        )
    mu = found[0]
    point = {(a, v): 1 for a, v in mu.items}
    if kappa is None:
        _, kappa = verify_Lk_polynomial(R, k, hom_cap)
    solution = {}
    for x in kappa.subset_keys():
        for psi in kappa.sets[x]:
            val = R.apply_monomial(R.hom_monomial(psi)).evaluate(point)
            if val.denominator != 1:
                raise AssertionError("non-integer evaluation of an integral output")
            solution[(x, psi)] = int(val)
    return solution, mu


def verify_fooling_solution(R, k, X, phi, kappa=None):
    """Substitute the evaluated vector into the pinned system; exact check."""
    if kappa is None:
        _, kappa = verify_Lk_polynomial(R, k)
    solution, mu = fooling_solution(R, k, X, phi, kappa)
    system = build_Lk(R.A, R.T, kappa, kappa.k)
    if not system.check_solution(solution):
        return False, {"reason": "marginal system violated"}
    key = (tuple(sorted(X)), phi)
    if solution.get(key) != 1:
        return False, {"reason": "pinned variable is not 1"}
    for psi in kappa.sets[tuple(sorted(X))]:
        if psi != phi and solution.get((tuple(sorted(X)), psi)) != 0:
            return False, {"reason": "sibling not 0", "sibling": psi}
    return True, {"mu": mu, "solution": solution}


def check_integrality(R, monomials, oracle_limit_vars=12):
    """Integrality sweep with a dual-path comparison on small universes.

    Reductions are integral by construction (hard error otherwise); for
    closures with few variables the strategy-subtraction oracle recomputes
    the reduction and must agree coefficient for coefficient.
    """
    checked = 0
    compared = 0
    mismatches = []
    for m in monomials:
        out = R.apply_monomial(m)
        checked += 1
        if not out.is_integral():
            mismatches.append((m, "non-integral"))
            continue
        V = R.ideal_for(R.closure_of(m))
        if len(V.universe_desc) <= oracle_limit_vars:
            compared += 1
            if oracle_reduce(V, m) != out:
                mismatches.append((m, "oracle disagrees"))
    report = VerifyReport("integrality", not mismatches, checked, mismatches)
    return report, compared


def closure_containment_violations(R, monomials):
    """Monomials in outputs must have closures inside the input's closure."""
    bad = []
    for m in monomials:
        cl_m = R.closure_of(m)
        for mm in R.apply_monomial(m).terms:
            if not R.closure_of(mm) <= cl_m:
                bad.append((m, mm))
    return bad
