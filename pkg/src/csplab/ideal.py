"""Boolean encodings, lexicographic orders, vanishing ideals, and reduction.

Variables are pairs ``(element, value)`` indicating "element is mapped to
value".  Coefficients are exact rationals.  Reduction of a monomial modulo the
vanishing ideal of a Boolean point set is decided by a blocking-game recursion
and computed by interpolation over the standard-monomial basis; a strategy
polynomial construction doubles as an independent oracle for both.
"""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import json

from .errors import IntegralityError
from .relational import enumerate_homs


# ---------------------------------------------------------------------------
# Monomials and polynomials


class Monomial:
    """A power product of (element, value) variables.

    Most of the package works with multilinear monomials; general exponents
    exist so pre-multilinearization inputs can be expressed.
    """

    __slots__ = ("powers",)

    def __init__(self, powers=()):
        if isinstance(powers, dict):
            powers = powers.items()
        norm = tuple(sorted((v, int(e)) for v, e in powers if e))
        if any(e < 0 for _, e in norm):
            raise ValueError("negative exponent")
        object.__setattr__(self, "powers", norm)

    @classmethod
    def from_vars(cls, variables):
        counts = {}
        for v in variables:
            counts[v] = counts.get(v, 0) + 1
        return cls(counts)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.powers == other.powers

    def __hash__(self):
        return hash(self.powers)

    def __repr__(self):
        if not self.powers:
            return "1"
        bits = []
        for (a, i), e in self.powers:
            s = f"x[{a},{i}]"
            bits.append(s if e == 1 else f"{s}^{e}")
        return "*".join(bits)

    @property
    def degree(self):
        return sum(e for _, e in self.powers)

    def variables(self):
        return frozenset(v for v, _ in self.powers)

    @property
    def is_multilinear(self):
        return all(e == 1 for _, e in self.powers)

    def multilinearize(self):
        return Monomial({v: 1 for v, _ in self.powers})

    def elements(self):
        """Instance elements mentioned by this monomial."""
        return frozenset(a for (a, _), _ in self.powers)

    def mul(self, other):
        counts = dict(self.powers)
        for v, e in other.powers:
            counts[v] = counts.get(v, 0) + e
        return Monomial(counts)

    def mul_var(self, var):
        counts = dict(self.powers)
        counts[var] = counts.get(var, 0) + 1
        return Monomial(counts)

    def divides(self, other):
        d = dict(other.powers)
        return all(d.get(v, 0) >= e for v, e in self.powers)

    def evaluate(self, point):
        """Evaluate at a map var -> number; absent vars read as 0."""
        out = 1
        for v, e in self.powers:
            out *= point.get(v, 0) ** e
            if out == 0:
                return 0
        return out


MONO_ONE = Monomial()


class Polynomial:
    """A polynomial with exact rational coefficients; zero terms dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            terms = terms.items()
        acc = {}
        for m, c in terms:
            c = Fraction(c)
            if c:
                acc[m] = acc.get(m, Fraction(0)) + c
        object.__setattr__(self, "terms", {m: c for m, c in acc.items() if c})

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({MONO_ONE: 1})

    @classmethod
    def monomial(cls, m, coef=1):
        return cls({m: coef})

    @classmethod
    def variable(cls, var):
        return cls({Monomial.from_vars([var]): 1})

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0].powers)))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [
            f"{c}*{m!r}"
            for m, c in sorted(self.terms.items(), key=lambda kv: kv[0].powers)
        ]
        return " + ".join(parts)

    def __add__(self, other):
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return Polynomial(acc)

    def __sub__(self, other):
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, Fraction(0)) - c
        return Polynomial(acc)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return Polynomial({m: c * v for m, v in self.terms.items()})

    def mul_monomial(self, mono):
        return Polynomial({m.mul(mono): c for m, c in self.terms.items()})

    def multilinearize(self):
        return Polynomial([(m.multilinearize(), c) for m, c in self.terms.items()])

    @property
    def degree(self):
        return max((m.degree for m in self.terms), default=0)

    def monomials(self):
        return set(self.terms)

    def coefficient(self, m):
        return self.terms.get(m, Fraction(0))

    def evaluate(self, point):
        return sum((c * m.evaluate(point) for m, c in self.terms.items()), Fraction(0))

    def is_integral(self):
        return all(c.denominator == 1 for c in self.terms.values())


# ---------------------------------------------------------------------------
# Lexicographic orders


class LexOrder:
    """A total variable order and the lexicographic monomial order it induces.

    ``vars_desc`` lists variables from largest to smallest.  Monomial keys
    sort ascending: ``key(m1) < key(m2)`` iff ``m1`` precedes ``m2``.
    """

    def __init__(self, vars_desc):
        self.vars_desc = tuple(vars_desc)
        if len(set(self.vars_desc)) != len(self.vars_desc):
            raise ValueError("variable order repeats a variable")
        self._pos = {v: i for i, v in enumerate(self.vars_desc)}

    def __contains__(self, var):
        return var in self._pos

    def __len__(self):
        return len(self.vars_desc)

    def position(self, var):
        return self._pos[var]

    def key(self, m):
        """Sort key ascending in the order.

        Positions are flipped so high-order variables contribute large
        entries and exponents repeat them; plain tuple comparison then
        implements the leftmost-difference rule.
        """
        n = len(self.vars_desc)
        entries = []
        for v, e in m.powers:
            entries.extend([n - 1 - self._pos[v]] * e)
        entries.sort(reverse=True)
        return tuple(entries)

    def less(self, m1, m2):
        return self.key(m1) < self.key(m2)

    def sorted_monomials(self, monomials, reverse=False):
        return sorted(monomials, key=self.key, reverse=reverse)

    def leading_monomial(self, poly):
        if not poly:
            raise ValueError("zero polynomial has no leading monomial")
        return max(poly.terms, key=self.key)

    def restrict(self, variables):
        """The induced order on a subset of the variables."""
        variables = set(variables)
        return LexOrder([v for v in self.vars_desc if v in variables])

    def respects_vertex_order(self, vertex_order):
        """Check x_{u,i} < x_{v,j} whenever u precedes v."""
        rank = {u: i for i, u in enumerate(vertex_order)}
        seq = [rank[a] for (a, _) in reversed(self.vars_desc)]
        return all(seq[i] <= seq[i + 1] for i in range(len(seq) - 1))


def order_for(A, T, vertex_order=None, value_order=None):
    """Lex order over the variables of (A, T) respecting a vertex order.

    Vertices earlier in ``vertex_order`` get smaller variables; within a
    vertex, values follow the template domain order.
    """
    vorder = list(vertex_order) if vertex_order is not None else list(A.domain)
    values = list(value_order) if value_order is not None else list(T.domain)
    asc = [(a, i) for a in vorder for i in values]
    return LexOrder(tuple(reversed(asc)))


# ---------------------------------------------------------------------------
# CSP encoding


@dataclass(frozen=True)
class EncodedCsp:
    """The four axiom families of the Boolean homomorphism encoding."""

    covering: tuple  # one per element: sum_i x_{a,i} - 1
    uniqueness: tuple  # x_{a,i} x_{a,i'} for i != i'
    forbidden: tuple  # one per (tuple, non-image assignment)
    boolean: tuple  # x^2 - x per variable

    def all_axioms(self):
        return (
            list(self.covering)
            + list(self.uniqueness)
            + list(self.forbidden)
            + list(self.boolean)
        )

    def variables(self):
        out = set()
        for p in self.all_axioms():
            for m in p.terms:
                out |= m.variables()
        return out


def encode_csp(A, T):
    """Polynomials whose common Boolean roots are exactly hom(A, T)."""
    covering = []
    uniqueness = []
    boolean = []
    for a in A.domain:
        s = Polynomial({Monomial.from_vars([(a, i)]): 1 for i in T.domain})
        covering.append(s - Polynomial.one())
        for i, ip in itertools.combinations(T.domain, 2):
            uniqueness.append(Polynomial.monomial(Monomial.from_vars([(a, i), (a, ip)])))
        for i in T.domain:
            var = (a, i)
            boolean.append(Polynomial({Monomial({var: 2}): 1, Monomial({var: 1}): -1}))
    forbidden = set()
    for name, tup in A.all_tuples():
        good = T.relations[name]
        for image in itertools.product(T.domain, repeat=len(tup)):
            if image in good:
                continue
            forbidden.add(Monomial.from_vars(list(zip(tup, image))))
    forbidden_polys = [
        Polynomial.monomial(m) for m in sorted(forbidden, key=lambda m: m.powers)
    ]
    return EncodedCsp(
        tuple(covering), tuple(uniqueness), tuple(forbidden_polys), tuple(boolean)
    )


# ---------------------------------------------------------------------------
# Point sets and reducibility


class PointSetIdeal:
    """A finite set V of {0,1} vectors standing for its vanishing ideal I(V).

    The variable universe is held in descending order; points are bitmasks
    with bit j holding the coordinate of ``universe_desc[j]``.
    """

    def __init__(self, universe_desc, points):
        self.universe_desc = tuple(universe_desc)
        if len(set(self.universe_desc)) != len(self.universe_desc):
            raise ValueError("universe repeats a variable")
        n = len(self.universe_desc)
        pts = frozenset(int(p) for p in points)
        for p in pts:
            if p < 0 or p >> n:
                raise ValueError("point outside {0,1}^universe")
        self.points = pts
        self._pos = {v: i for i, v in enumerate(self.universe_desc)}
        self._interpolator = None

    @classmethod
    def from_vectors(cls, universe_desc, vectors):
        universe_desc = tuple(universe_desc)
        pts = []
        for vec in vectors:
            if len(vec) != len(universe_desc):
                raise ValueError("vector has wrong dimension")
            mask = 0
            for j, bit in enumerate(vec):
                if bit not in (0, 1):
                    raise ValueError("non-Boolean coordinate")
                mask |= bit << j
            pts.append(mask)
        if len(set(pts)) != len(pts):
            raise ValueError("points are not distinct")
        return cls(universe_desc, pts)

    def __len__(self):
        return len(self.points)

    @property
    def order(self):
        return LexOrder(self.universe_desc)

    def vectors(self):
        n = len(self.universe_desc)
        return sorted(tuple((p >> j) & 1 for j in range(n)) for p in self.points)

    def point_maps(self):
        """Each point as a dict var -> 0/1, in sorted mask order."""
        out = []
        for p in sorted(self.points):
            out.append({v: (p >> j) & 1 for j, v in enumerate(self.universe_desc)})
        return out

    def contains_vars(self, m):
        return m.variables() <= set(self.universe_desc)

    def mono_mask(self, m):
        mask = 0
        for v in m.variables():
            mask |= 1 << self._pos[v]
        return mask

    def evaluate_monomial_on_points(self, m):
        """Evaluation vector of a multilinear monomial over sorted points."""
        mask = self.mono_mask(m)
        return [1 if (p & mask) == mask else 0 for p in sorted(self.points)]


def _check_order(V, order):
    if order is not None and tuple(order.vars_desc) != V.universe_desc:
        raise ValueError("order does not match the point set universe")


def _lea_wins(alpha, j, W, memo):
    """Game value at coordinate position j with residual point set W.

    ``alpha`` is the bitmask of positions where the monomial has exponent 1.
    Positions are processed from high (smallest variable) to low.  The first
    player wins an empty residual set outright; with no guesses left some
    point survives and she loses; on a guess coordinate she may force either
    branch; on a free coordinate she must win both nonempty branches.
    """
    if not W:
        return True
    low = alpha & ((2 << j) - 1) if j >= 0 else 0
    if low == 0:
        return False
    key = (low, j, W)
    hit = memo.get(key)
    if hit is not None:
        return hit
    bit = 1 << j
    W0 = frozenset(p for p in W if not p & bit)
    W1 = W - W0
    if alpha & bit:
        out = _lea_wins(alpha, j - 1, W0, memo) or _lea_wins(alpha, j - 1, W1, memo)
    else:
        out = _lea_wins(alpha, j - 1, W0, memo) and _lea_wins(alpha, j - 1, W1, memo)
    memo[key] = out
    return out


def lex_reducible(V, m, order=None):
    """Decide reducibility of ``m`` modulo I(V) under the universe order.

    A repeated variable is reducible outright over Boolean points (x^2 - x
    lies in the ideal).  For multilinear monomials the blocking-game
    recursion runs over the residual point sets, memoized per call.
    """
    _check_order(V, order)
    if not V.contains_vars(m):
        raise ValueError("monomial mentions variables outside the universe")
    if not V.points:
        return True
    if any(e >= 2 for _, e in m.powers):
        return True
    alpha = V.mono_mask(m)
    return _lea_wins(alpha, len(V.universe_desc) - 1, frozenset(V.points), {})


def standard_monomials(V, order=None, max_degree=None):
    """Irreducible multilinear monomials of degree <= max_degree, ascending.

    Irreducible monomials are closed under divisors, so a DFS that only
    extends irreducible monomials enumerates all of them.  With no degree cap
    the count equals |V|.
    """
    _check_order(V, order)
    n = len(V.universe_desc)
    cap = n if max_degree is None else min(max_degree, n)
    found = []

    def extend(mono, start):
        found.append(mono)
        if mono.degree >= cap:
            return
        for j in range(start, n):
            cand = mono.mul_var(V.universe_desc[j])
            if not lex_reducible(V, cand):
                extend(cand, j + 1)

    if V.points:
        extend(MONO_ONE, 0)
    found.sort(key=V.order.key)
    return found


class _Interpolator:
    """Exact solver for the standard-monomial interpolation system of V.

    Rows are points in sorted mask order, columns standard monomials.  A
    fraction-free elimination of the augmented system [A | I] is cached; the
    augmented block records the row operations, so U = L A holds exactly and
    each reduction solves one triangular system.
    """

    def __init__(self, V):
        self.V = V
        self.std = standard_monomials(V)
        k = len(V.points)
        if len(self.std) != k:
            raise AssertionError(f"standard monomial count {len(self.std)} != |V| = {k}")
        cols = [V.evaluate_monomial_on_points(s) for s in self.std]
        M = [
            [cols[j][i] for j in range(k)] + [int(i == r) for r in range(k)]
            for i in range(k)
        ]
        prev = 1
        for col in range(k):
            piv = next((r for r in range(col, k) if M[r][col] != 0), None)
            if piv is None:
                raise AssertionError("interpolation matrix is singular")
            M[col], M[piv] = M[piv], M[col]
            for r in range(col + 1, k):
                mrc = M[r][col]
                if mrc == 0 and prev == 1:
                    continue
                pivval = M[col][col]
                rowr = M[r]
                rowc = M[col]
                for c in range(col + 1, 2 * k):
                    rowr[c] = (rowr[c] * pivval - mrc * rowc[c]) // prev
                rowr[col] = 0
            prev = M[col][col]
        self.k = k
        self.U = [row[:k] for row in M]
        self.L = [row[k:] for row in M]

    def reduce_vector(self, values):
        """Coefficients c with sum_j c_j std_j agreeing with ``values`` on V."""
        k = self.k
        rhs = [sum(L_i[r] * values[r] for r in range(k) if L_i[r]) for L_i in self.L]
        coeffs = [Fraction(0)] * k
        for i in range(k - 1, -1, -1):
            s = Fraction(rhs[i])
            Ui = self.U[i]
            for j in range(i + 1, k):
                if Ui[j] and coeffs[j]:
                    s -= Ui[j] * coeffs[j]
            coeffs[i] = s / Ui[i]
        return coeffs


def _interpolator(V):
    if V._interpolator is None:
        V._interpolator = _Interpolator(V)
    return V._interpolator


def reduce(V, m, order=None):
    """The reduction of ``m`` modulo I(V): the unique combination of standard
    monomials agreeing with ``m`` on every point of V.

    Coefficients are asserted integral; a violation is a hard error.  For an
    empty point set the ideal is the whole ring and the reduction is 0.
    """
    _check_order(V, order)
    if not V.contains_vars(m):
        raise ValueError("monomial mentions variables outside the universe")
    if not V.points:
        return Polynomial.zero()
    mm = m.multilinearize()
    interp = _interpolator(V)
    values = V.evaluate_monomial_on_points(mm)
    coeffs = interp.reduce_vector(values)
    out = Polynomial({s: c for s, c in zip(interp.std, coeffs) if c})
    if not out.is_integral():
        raise IntegralityError(f"non-integer reduction of {m!r}: {out!r}")
    return out


def reduce_poly(V, p, order=None):
    """Linear extension of ``reduce`` over the monomials of ``p``."""
    _check_order(V, order)
    out = Polynomial.zero()
    for m, c in p.terms.items():
        out = out + reduce(V, m).scale(c)
    return out


def strategy_polynomial(V, m, order=None):
    """An integral polynomial in I(V) with leading monomial ``m``.

    For a repeated variable the Boolean axiom multiple ``m - m/x`` works.
    Otherwise one factor ``x_j - f_j`` is taken per variable of ``m``, where
    the guess function ``f_j`` encodes the winning blocking move at every
    suffix state in indicator-polynomial form.
    """
    _check_order(V, order)
    if not lex_reducible(V, m):
        raise ValueError("strategy polynomial requested for an irreducible monomial")
    for v, e in m.powers:
        if e >= 2:
            lower = Monomial({w: (ee - 1 if w == v else ee) for w, ee in m.powers})
            return Polynomial({m: 1, lower: -1})
    if not V.points:
        return Polynomial.monomial(m)

    n = len(V.universe_desc)
    alpha = V.mono_mask(m)
    memo = {}

    def guesses(j):
        """(suffix assignment over positions > j, winning guess) pairs."""
        table = []

        def walk(pos, W, assign):
            if pos == j:
                bit = 1 << j
                W0 = frozenset(p for p in W if not p & bit)
                # Guessing g forbids the answer g; she guesses 1 to force the
                # 0-branch when that branch is winning, else guesses 0.
                g = 1 if _lea_wins(alpha, j - 1, W0, memo) else 0
                table.append((dict(assign), g))
                return
            bit = 1 << pos
            for b in (0, 1):
                Wb = frozenset(p for p in W if ((p >> pos) & 1) == b)
                assign[pos] = b
                walk(pos - 1, Wb, assign)
                del assign[pos]

        walk(n - 1, frozenset(V.points), {})
        return table

    def indicator(assign):
        out = Polynomial.one()
        for pos, b in sorted(assign.items()):
            var = V.universe_desc[pos]
            xv = Monomial.from_vars([var])
            if b:
                out = out.mul_monomial(xv)
            else:
                out = out - out.mul_monomial(xv)
        return out

    result = Polynomial.one()
    for j in sorted((p for p in range(n) if alpha & (1 << p)), reverse=True):
        f = Polynomial.zero()
        for assign, g in guesses(j):
            if g:
                f = f + indicator(assign)
        factor = Polynomial.variable(V.universe_desc[j]) - f
        acc = Polynomial.zero()
        for mono, c in result.terms.items():
            acc = acc + factor.mul_monomial(mono).scale(c)
        result = acc
    if not result.is_integral():
        raise IntegralityError("strategy polynomial with non-integer coefficients")
    return result


def oracle_reduce(V, m, order=None):
    """Reduction by iterated subtraction of strategy polynomials.

    Independent of the interpolation path; used as a test oracle.  Each step
    removes the largest reducible monomial, so termination follows from the
    order being a well-order on the finitely many multilinear monomials.
    """
    _check_order(V, order)
    ord_ = V.order
    work = Polynomial.monomial(m).multilinearize()
    if not V.points:
        return Polynomial.zero()
    while True:
        reducibles = [mm for mm in work.terms if lex_reducible(V, mm)]
        if not reducibles:
            return work
        target = max(reducibles, key=ord_.key)
        c = work.coefficient(target)
        p = strategy_polynomial(V, target).multilinearize()
        assert ord_.leading_monomial(p) == target
        work = work - p.scale(c / p.coefficient(target))


def hom_point_set(A, T, X, order, cap=10**6):
    """Indicator vectors of hom(A[X], T) over the variables {x_{a,i}: a in X}.

    The universe is the restriction of ``order`` to these variables, so
    reductions computed here agree with reductions in the ambient ring.
    """
    X = frozenset(X)
    variables = {(a, i) for a in X for i in T.domain}
    sub = order.restrict(variables)
    if len(sub) != len(variables):
        raise ValueError("order does not cover all variables over X")
    homs = enumerate_homs(A, T, X, cap=cap)
    pos = {v: j for j, v in enumerate(sub.vars_desc)}
    pts = []
    for phi in homs:
        mask = 0
        for a, i in phi.items:
            mask |= 1 << pos[(a, i)]
        pts.append(mask)
    return PointSetIdeal(sub.vars_desc, pts)


# ---------------------------------------------------------------------------
# Serialization


def polynomial_to_json(p, order):
    """JSON list of terms with exact rational strings, descending order."""
    entries = []
    for m in order.sorted_monomials(p.terms, reverse=True):
        c = p.terms[m]
        variables = []
        for v, e in sorted(m.powers, key=lambda ve: order.position(ve[0])):
            variables.extend([list(v)] * e)
        entries.append({"coef": f"{c.numerator}/{c.denominator}", "vars": variables})
    return json.dumps(entries)


def polynomial_from_json(text):
    entries = json.loads(text)
    terms = {}
    for entry in entries:
        num, den = entry["coef"].split("/")
        m = Monomial.from_vars([tuple(v) for v in entry["vars"]])
        terms[m] = terms.get(m, Fraction(0)) + Fraction(int(num), int(den))
    return Polynomial(terms)
