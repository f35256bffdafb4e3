"""The local-consistency hierarchy: k-consistency, integer-affine, and the
pinned-solution refinement loop.

A consistency family maps each subset X of the instance domain with |X| <= k
to a set of partial homomorphisms on X.  All three algorithms prune the full
family; the affine variants additionally ask for integer solutions of the
marginal system L_k, with variables materialized only on the family's support
(everything else is implicitly zero).
"""

from dataclasses import dataclass, field
import itertools

from .errors import HomBudgetExceeded
from .intsolve import LinearSystemZ, solve_integer, solve_with_pins
from .relational import PartialHom, enumerate_homs, extends

DEFAULT_SUBSET_CAP = 2_000_000


def subsets_up_to(domain, k, subset_cap=DEFAULT_SUBSET_CAP):
    """All subsets of the domain with size <= k, as sorted tuples."""
    domain = list(domain)
    out = []
    for size in range(0, min(k, len(domain)) + 1):
        for combo in itertools.combinations(domain, size):
            out.append(tuple(sorted(combo)))
            if len(out) > subset_cap:
                raise MemoryError(
                    f"subset enumeration produced more than {subset_cap} subsets"
                )
    return out


def constraint_supports(A):
    """Supports of constraints: the element set of each tuple."""
    return {frozenset(t) for _, t in A.all_tuples()}


def restricted_subsets(A, k, subset_cap=DEFAULT_SUBSET_CAP):
    """Singletons, constraint supports, and their unions up to size k.

    A deliberately non-conforming subset pool for scaling experiments; the
    conforming default is ``subsets_up_to``.
    """
    pool = {(): None}
    seeds = [frozenset([a]) for a in A.domain] + sorted(
        constraint_supports(A), key=sorted
    )
    frontier = {frozenset()}
    result = {frozenset()}
    changed = True
    while changed:
        changed = False
        new_frontier = set()
        for base in frontier:
            for s in seeds:
                u = base | s
                if len(u) <= k and u not in result:
                    result.add(u)
                    new_frontier.add(u)
                    changed = True
                    if len(result) > subset_cap:
                        raise MemoryError("restricted subset pool overflow")
        frontier = new_frontier
    del pool
    return sorted((tuple(sorted(x)) for x in result), key=lambda t: (len(t), t))


@dataclass
class ConsistencyFamily:
    """kappa(X) for each tracked subset X (keys are sorted tuples)."""

    k: int
    sets: dict  # tuple(sorted X) -> set of PartialHom

    def copy(self):
        return ConsistencyFamily(self.k, {x: set(v) for x, v in self.sets.items()})

    def subset_keys(self):
        return sorted(self.sets, key=lambda t: (len(t), t))

    def is_empty_somewhere(self):
        return any(not v for v in self.sets.values())

    def is_all_empty(self):
        return all(not v for v in self.sets.values())

    def total_size(self):
        return sum(len(v) for v in self.sets.values())


def full_family(A, T, k, hom_cap=10**6, subsets=None):
    """The initial family: hom(A[X], T) for every tracked subset X."""
    keys = subsets if subsets is not None else subsets_up_to(A.domain, k)
    sets = {x: set(enumerate_homs(A, T, x, cap=hom_cap)) for x in keys}
    return ConsistencyFamily(min(k, len(A.domain)), sets)


def max_k_consistent(H0, A, T, k=None):
    """The unique maximal k-consistent subcollection of H0.

    Iterated batch deletion: drop members whose restriction to some subset is
    missing, and members of smaller sets with no extension in some k-sized
    superset.  Deletions are collected per sweep, so the result does not
    depend on iteration order.
    """
    k = H0.k if k is None else min(k, len(A.domain))
    fam = H0.copy()
    keys = fam.subset_keys()
    key_set = set(keys)
    top_keys = [x for x in keys if len(x) == k]
    while True:
        removals = {x: set() for x in keys}
        for x in keys:
            members = fam.sets[x]
            for y in _subset_keys_of(x):
                if y == x or y not in key_set:
                    continue
                kap_y = fam.sets[y]
                restricted = {}
                for phi in members:
                    r = phi.restrict(frozenset(y))
                    restricted.setdefault(r, []).append(phi)
                # Down-closure: members whose restriction left kappa(Y).
                for r, phis in restricted.items():
                    if r not in kap_y:
                        removals[x].update(phis)
                # Extendability: members of kappa(Y) with no extension here.
                if len(x) == k:
                    reachable = set(restricted)
                    for psi in kap_y:
                        if psi not in reachable:
                            removals[y].add(psi)
        if all(not r for r in removals.values()):
            break
        for x, gone in removals.items():
            fam.sets[x] -= gone
    return fam


def _subset_keys_of(x):
    out = []
    for size in range(0, len(x) + 1):
        out.extend(tuple(c) for c in itertools.combinations(x, size))
    return out


def family_invariant_violations(fam, A, T):
    """Down-closure and extendability violations, for tests and audits."""
    violations = []
    keys = fam.subset_keys()
    key_set = set(keys)
    k = fam.k
    for x in keys:
        for phi in fam.sets[x]:
            for y in _subset_keys_of(x):
                if y == x or y not in key_set:
                    continue
                if phi.restrict(frozenset(y)) not in fam.sets[y]:
                    violations.append(("down-closure", x, phi, y))
    for y in keys:
        if len(y) >= k:
            continue
        for phi in fam.sets[y]:
            for x in keys:
                if len(x) != k or not set(y) <= set(x):
                    continue
                if not any(
                    extends(psi, phi) for psi in fam.sets[x]
                ):
                    violations.append(("extendability", y, phi, x))
    return violations


def build_Lk(A, T, kappa, k, subsets=None):
    """The marginal system over the family's support.

    One covering row per subset X (an empty kappa(X) yields the infeasible
    row 0 = 1) and one marginal row per (Y proper subset of X, psi in
    kappa(Y)).
    """
    keys = subsets if subsets is not None else kappa.subset_keys()
    variables = []
    for x in keys:
        for phi in sorted(kappa.sets.get(x, ()), key=lambda p: p.items):
            variables.append((x, phi))
    system = LinearSystemZ.empty(tuple(variables))
    key_set = set(keys)
    for x in keys:
        members = sorted(kappa.sets.get(x, ()), key=lambda p: p.items)
        system.add_row({(x, phi): 1 for phi in members}, 1)
        for y in _subset_keys_of(x):
            if y == x or y not in key_set:
                continue
            groups = {}
            for phi in members:
                groups.setdefault(phi.restrict(frozenset(y)), []).append(phi)
            for psi in sorted(kappa.sets.get(y, ()), key=lambda p: p.items):
                coeffs = {(x, phi): 1 for phi in groups.get(psi, ())}
                coeffs[(y, psi)] = coeffs.get((y, psi), 0) - 1
                system.add_row(coeffs, 0)
    return system


def indicator_solution(system, hom):
    """The 0/1 vector of a global homomorphism over the system variables."""
    mapping = hom.as_dict()
    out = {}
    for (x, phi) in system.variables:
        out[(x, phi)] = int(all(mapping[a] == v for a, v in phi.items))
    return out


def _hom_finder(A, T, hom_cap):
    try:
        return GlobalHomFinder(A, T, hom_cap)
    except HomBudgetExceeded:
        return None


@dataclass
class HierarchyResult:
    verdict: str  # "accept" | "reject"
    algorithm: str
    k: int
    reason: str = ""
    family_sizes: dict = field(default_factory=dict)
    certificate: dict | None = None
    warnings: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def _arity_warning(A, k):
    arities = [ar for _, ar in A.signature.symbols]
    if arities and k < max(arities):
        return [f"k={k} below the maximal arity {max(arities)}"]
    return []


def run_kcons(A, T, k, hom_cap=10**6, subsets=None):
    """Plain k-consistency: accept iff the maximal family is nonempty."""
    fam = max_k_consistent(full_family(A, T, k, hom_cap, subsets), A, T)
    verdict = "reject" if fam.is_empty_somewhere() else "accept"
    return HierarchyResult(
        verdict,
        "kcons",
        fam.k,
        family_sizes={str(x): len(v) for x, v in fam.sets.items()},
        warnings=_arity_warning(A, k),
    )


def run_z_affine(A, T, k, hom_cap=10**6, subsets=None):
    """k-consistency followed by integer feasibility of the marginal system.

    A known global homomorphism short-circuits the solve: its indicator is a
    solution, which is still substituted and checked before accepting.
    """
    warnings = _arity_warning(A, k)
    fam = max_k_consistent(full_family(A, T, k, hom_cap, subsets), A, T)
    if fam.is_empty_somewhere():
        return HierarchyResult(
            "reject", "zaffine", fam.k, reason="consistency family empties",
            warnings=warnings,
        )
    system = build_Lk(A, T, fam, fam.k, subsets=subsets)
    finder = _hom_finder(A, T, hom_cap)
    hom = finder.find() if finder is not None else None
    if hom is not None:
        sol = indicator_solution(system, hom)
        if not system.check_solution(sol):
            raise AssertionError("indicator of a homomorphism violates L_k")
        return HierarchyResult(
            "accept",
            "zaffine",
            fam.k,
            reason="indicator solution from a global homomorphism",
            certificate={"solution": sol},
            warnings=warnings,
        )
    result = solve_integer(system)
    if result.status == "solution":
        return HierarchyResult(
            "accept",
            "zaffine",
            fam.k,
            certificate={"solution": result.solution},
            warnings=warnings,
        )
    return HierarchyResult(
        "reject", "zaffine", fam.k, reason=f"L_k infeasible: {result.reason}",
        warnings=warnings,
    )


def _hom_matches(hom_map, phi):
    return all(hom_map[a] == v for a, v in phi.items)


def _pinned_feasible(system, key, siblings, hom_pool, sol_pool, extender,
                     check_indicators=False):
    """Feasibility of the pins x_key = 1, x_sib = 0.

    Certificates are tried cheapest first: global homomorphisms found for
    earlier pins (an extending homomorphism's indicator matches the pins and
    solves the system by substitution), previously found integer solutions,
    a fresh extension search, and finally the integer solve.

    Returns (feasible, certificate) where the certificate is ("hom", map) or
    ("solution", vector).
    """
    x, phi = key
    for hom_map in hom_pool:
        if _hom_matches(hom_map, phi):
            return True, ("hom", hom_map)
    for sol in sol_pool:
        if sol.get(key) == 1 and all(sol.get(s, 0) == 0 for s in siblings):
            return True, ("solution", sol)
    if extender is not None:
        hom = extender(phi)
        if hom is not None:
            hom_map = hom.as_dict()
            if check_indicators:
                sol = indicator_solution(system, hom)
                if not system.check_solution(sol):
                    raise AssertionError("indicator of a homomorphism violates L_k")
            hom_pool.append(hom_map)
            return True, ("hom", hom_map)
    pins = {key: 1}
    for s in siblings:
        pins[s] = 0
    result = solve_with_pins(system, pins)
    if result.status == "solution":
        sol_pool.append(result.solution)
        return True, ("solution", result.solution)
    return False, None


def run_cohomological(A, T, k, hom_cap=10**6, subsets=None, keep_trace=False):
    """The pinned-solution refinement loop.

    Each iteration recomputes the maximal k-consistent family, then demands
    for every surviving phi an integer solution of the marginal system with
    x_phi pinned to 1 and its same-domain siblings pinned to 0.  Failures are
    removed in a batch after the full sweep.
    """
    warnings = _arity_warning(A, k)
    fam = full_family(A, T, k, hom_cap, subsets)
    k_eff = fam.k
    satisfiable = _find_global_hom(A, T, hom_cap) is not None

    def extender(phi):
        # A homomorphism extending phi certifies its pin by indicator.
        if not satisfiable:
            return None
        try:
            found = enumerate_homs(
                A, T, A.domain, cap=hom_cap, pins=phi.as_dict(),
                first_only=True, node_budget=200_000,
            )
        except HomBudgetExceeded:
            return None
        return found[0] if found else None

    trace = []
    iteration = 0
    while True:
        iteration += 1
        fam = max_k_consistent(fam, A, T, k_eff)
        if fam.is_empty_somewhere():
            trace.append({"iteration": iteration, "event": "family empties"})
            return HierarchyResult(
                "reject",
                "cohomological",
                k_eff,
                reason="consistency family empties",
                warnings=warnings,
                trace=trace if keep_trace else [],
            )
        system = build_Lk(A, T, fam, k_eff, subsets=subsets)
        hom_pool = []
        sol_pool = []
        removals = []
        certificates = {}
        for x in fam.subset_keys():
            members = sorted(fam.sets[x], key=lambda p: p.items)
            for phi in members:
                key = (x, phi)
                siblings = [(x, psi) for psi in members if psi != phi]
                ok, cert = _pinned_feasible(
                    system, key, siblings, hom_pool, sol_pool, extender,
                    check_indicators=keep_trace,
                )
                if ok:
                    if keep_trace:
                        kind, payload = cert
                        if kind == "hom":
                            payload = indicator_solution(
                                system, PartialHom(tuple(sorted(payload.items())))
                            )
                        certificates[repr(key)] = {
                            "kind": kind,
                            "solution": {repr(v): c for v, c in payload.items() if c},
                        }
                else:
                    removals.append(key)
        trace.append(
            {
                "iteration": iteration,
                "removed": [repr(r) for r in removals],
                "certificates": certificates if keep_trace else {},
            }
        )
        if not removals:
            break
        for x, phi in removals:
            fam.sets[x].discard(phi)
    verdict = "reject" if fam.is_empty_somewhere() else "accept"
    return HierarchyResult(
        verdict,
        "cohomological",
        k_eff,
        family_sizes={str(x): len(v) for x, v in fam.sets.items()},
        warnings=warnings,
        trace=trace if keep_trace else [],
    )
