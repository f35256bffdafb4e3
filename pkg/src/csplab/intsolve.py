"""Exact integer linear systems: presolve, column Hermite form, certificates.

``solve_integer`` decides Ax = b over the integers.  A substitution presolve
eliminates variables with unit coefficients (these dominate the consistency
systems built elsewhere in the package); the remaining core is settled by a
column-style Hermite normal form A U = H with unimodular U, solved by forward
substitution with divisibility checks.  Arbitrary-precision integers are used
throughout.
"""

from dataclasses import dataclass, field


@dataclass
class LinearSystemZ:
    """Rows of integer equations over a fixed variable index."""

    variables: tuple
    rows: list  # list of dict col_index -> int
    rhs: list  # list of int

    def __post_init__(self):
        self.var_index = {v: i for i, v in enumerate(self.variables)}

    @classmethod
    def empty(cls, variables):
        return cls(tuple(variables), [], [])

    def add_row(self, coeffs, rhs):
        """coeffs: mapping variable -> int coefficient."""
        row = {}
        for v, c in coeffs.items():
            if c:
                row[self.var_index[v]] = int(c)
        self.rows.append(row)
        self.rhs.append(int(rhs))

    def residuals(self, solution):
        """Row residuals of a candidate solution (mapping variable -> int)."""
        x = [int(solution.get(v, 0)) for v in self.variables]
        return [
            sum(c * x[j] for j, c in row.items()) - b
            for row, b in zip(self.rows, self.rhs)
        ]

    def check_solution(self, solution):
        return all(r == 0 for r in self.residuals(solution))


@dataclass
class HnfCertificate:
    """Column HNF data for the dense core: A_core U = H with det U = +-1."""

    matrix: list  # A_core rows (lists of ints)
    rhs: list
    transform: list  # U, square over the core columns
    hnf: list  # H = A_core @ U
    core_variables: tuple
    status: str  # "solution" | "rational-infeasible" | "divisibility-infeasible"
    detail: dict = field(default_factory=dict)

    def verify(self):
        """Recheck the certificate: reconstruction and unimodularity."""
        if not _mat_eq(_mat_mul(self.matrix, self.transform), self.hnf):
            return False
        d = det_int(self.transform)
        return d in (1, -1)


@dataclass
class IntSolveResult:
    status: str  # "solution" | "infeasible"
    solution: dict | None
    certificate: HnfCertificate | None
    reason: str = ""


def _mat_mul(A, B):
    n = len(B)
    m = len(B[0]) if B else 0
    out = []
    for row in A:
        out.append([sum(row[k] * B[k][j] for k in range(n)) for j in range(m)])
    return out


def _mat_eq(A, B):
    return len(A) == len(B) and all(ra == rb for ra, rb in zip(A, B))


def det_cofactor(M):
    """Determinant by cofactor expansion; intended for size <= 8."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        if M[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1 :] for row in M[1:]]
        total += (-1) ** j * M[0][j] * det_cofactor(minor)
    return total


def det_bareiss(M):
    """Exact integer determinant by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(row) for row in M]
    sign = 1
    prev = 1
    for col in range(n - 1):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            sign = -sign
        for r in range(col + 1, n):
            for c in range(col + 1, n):
                A[r][c] = (A[r][c] * A[col][col] - A[r][col] * A[col][c]) // prev
            A[r][col] = 0
        prev = A[col][col]
    return sign * A[n - 1][n - 1]


def det_int(M):
    return det_cofactor(M) if len(M) <= 8 else det_bareiss(M)


def hermite_column_form(A):
    """Column-style Hermite form: returns (H, U) with A U = H, det U = +-1.

    H has a staircase of positive pivots; entries right of each pivot are
    zero and entries left of it are reduced into [0, pivot).  Columns are
    ordered sparsest-first before reduction to limit coefficient growth.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    H = [list(row) for row in A]
    U = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colswap(i, j):
        if i == j:
            return
        for r in range(rows):
            H[r][i], H[r][j] = H[r][j], H[r][i]
        for r in range(cols):
            U[r][i], U[r][j] = U[r][j], U[r][i]

    def coladd(dst, src, mult):
        # column dst += mult * column src
        if mult == 0:
            return
        for r in range(rows):
            H[r][dst] += mult * H[r][src]
        for r in range(cols):
            U[r][dst] += mult * U[r][src]

    def colneg(i):
        for r in range(rows):
            H[r][i] = -H[r][i]
        for r in range(cols):
            U[r][i] = -U[r][i]

    if cols:
        density = [sum(1 for r in range(rows) if H[r][j]) for j in range(cols)]
        order = sorted(range(cols), key=lambda j: (density[j], j))
        perm = list(range(cols))
        for target, j in enumerate(order):
            cur = perm.index(j)
            colswap(target, cur)
            perm[target], perm[cur] = perm[cur], perm[target]

    pivot_col = 0
    pivots = []
    for r in range(rows):
        if pivot_col >= cols:
            break
        # Euclidean reduction across columns >= pivot_col on row r.
        while True:
            nz = [j for j in range(pivot_col, cols) if H[r][j] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda j: abs(H[r][j]))
            j0 = nz[0]
            for j in nz[1:]:
                q = H[r][j] // H[r][j0]
                coladd(j, j0, -q)
        nz = [j for j in range(pivot_col, cols) if H[r][j] != 0]
        if not nz:
            continue
        j0 = nz[0]
        colswap(pivot_col, j0)
        if H[r][pivot_col] < 0:
            colneg(pivot_col)
        # Reduce the entries to the left of the pivot into [0, pivot).
        p = H[r][pivot_col]
        for j in range(pivot_col):
            q = H[r][j] // p
            coladd(j, pivot_col, -q)
        pivots.append((r, pivot_col))
        pivot_col += 1
    return H, U, pivots


def solve_core(A, b, variables):
    """Solve the dense core by HNF with a full certificate."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    H, U, pivots = hermite_column_form(A)
    pivot_rows = {r: j for r, j in pivots}
    y = [0] * cols
    for r in range(rows):
        acc = b[r] - sum(H[r][j] * y[j] for j in range(cols) if H[r][j] and y[j])
        if r in pivot_rows:
            j = pivot_rows[r]
            p = H[r][j]
            if acc % p != 0:
                cert = HnfCertificate(
                    [list(row) for row in A],
                    list(b),
                    U,
                    H,
                    tuple(variables),
                    "divisibility-infeasible",
                    {"row": r, "pivot": p, "residual": acc},
                )
                return IntSolveResult(
                    "infeasible", None, cert, f"pivot {p} does not divide {acc}"
                )
            y[j] = acc // p
        else:
            if acc != 0:
                cert = HnfCertificate(
                    [list(row) for row in A],
                    list(b),
                    U,
                    H,
                    tuple(variables),
                    "rational-infeasible",
                    {"row": r, "residual": acc},
                )
                return IntSolveResult(
                    "infeasible", None, cert, f"row {r} reduces to 0 = {acc}"
                )
    x = [sum(U[i][j] * y[j] for j in range(cols) if y[j]) for i in range(cols)]
    solution = {v: x[i] for i, v in enumerate(variables)}
    cert = HnfCertificate(
        [list(row) for row in A], list(b), U, H, tuple(variables), "solution"
    )
    return IntSolveResult("solution", solution, cert)


def _presolve(system):
    """Eliminate variables via unit pivots and singleton rows.

    Returns (status, substitutions, core_rows, core_rhs, note) where each
    substitution is (var_col, coef, row_dict, rhs) meaning
    ``coef * x_var = rhs - sum(row_dict)`` over surviving variables.
    """
    rows = [dict(r) for r in system.rows]
    rhs = list(system.rhs)
    alive_rows = set(range(len(rows)))
    col_rows = {}
    for i in alive_rows:
        for j in rows[i]:
            col_rows.setdefault(j, set()).add(i)
    eliminated = {}
    subs = []

    def substitute(col, src):
        """Use row ``src`` with coefficient +-1 on ``col`` to eliminate it."""
        c = rows[src][col]
        expr = {j: v for j, v in rows[src].items() if j != col}
        val = rhs[src]
        # c * x = val - expr  =>  x = (val - expr) / c with c in {1, -1}
        subs.append((col, c, expr, val))
        eliminated[col] = len(subs) - 1
        for i in list(col_rows.get(col, ())):
            if i == src or i not in alive_rows:
                continue
            k = rows[i].pop(col)
            col_rows[col].discard(i)
            # row_i += -k/c * (row_src restricted), rhs likewise
            factor = -k * c  # since 1/c == c for c = +-1
            for j, v in expr.items():
                new = rows[i].get(j, 0) + factor * v
                if new:
                    rows[i][j] = new
                    col_rows.setdefault(j, set()).add(i)
                else:
                    rows[i].pop(j, None)
                    col_rows.get(j, set()).discard(i)
            rhs[i] += factor * val
        alive_rows.discard(src)
        for j in rows[src]:
            col_rows.get(j, set()).discard(src)
        col_rows.pop(col, None)

    progress = True
    while progress:
        progress = False
        for i in sorted(alive_rows):
            row = rows[i]
            if not row:
                if rhs[i] != 0:
                    return "infeasible", subs, rows, rhs, f"empty row 0 = {rhs[i]}"
                alive_rows.discard(i)
                progress = True
                continue
            if len(row) == 1:
                ((j, c),) = row.items()
                if c in (1, -1):
                    substitute(j, i)
                    progress = True
                    continue
                if rhs[i] % c != 0:
                    return (
                        "infeasible",
                        subs,
                        rows,
                        rhs,
                        f"{c} x = {rhs[i]} has no integer solution",
                    )
                # Normalize to a unit pivot and substitute the constant.
                rows[i] = {j: 1}
                rhs[i] = rhs[i] // c
                substitute(j, i)
                progress = True
                continue
        if progress:
            continue
        # Pick a unit-coefficient pivot with minimal fill (Markowitz-style).
        best = None
        for i in alive_rows:
            for j, c in rows[i].items():
                if c in (1, -1):
                    cost = (len(rows[i]) - 1) * (len(col_rows.get(j, ())) - 1)
                    cand = (cost, len(rows[i]), j, i)
                    if best is None or cand < best:
                        best = cand
        if best is not None:
            _, _, j, i = best
            substitute(j, i)
            progress = True

    core_rows = [rows[i] for i in sorted(alive_rows)]
    core_rhs = [rhs[i] for i in sorted(alive_rows)]
    return "open", subs, core_rows, core_rhs, ""


def solve_integer(system, presolve=True):
    """Exact integer solution of the system, or certified infeasibility.

    With ``presolve`` enabled, unit-coefficient variables are substituted out
    first and only the remaining core goes through the Hermite form.  Any
    returned solution satisfies every original row exactly (checked).
    """
    if not presolve:
        cols = len(system.variables)
        A = [[row.get(j, 0) for j in range(cols)] for row in system.rows]
        result = solve_core(A, list(system.rhs), system.variables)
        if result.status == "solution" and not system.check_solution(result.solution):
            raise AssertionError("solver returned a non-solution")
        return result

    status, subs, core_rows, core_rhs, note = _presolve(system)
    if status == "infeasible":
        return IntSolveResult("infeasible", None, None, note)

    core_cols = sorted({j for row in core_rows for j in row})
    col_pos = {j: k for k, j in enumerate(core_cols)}
    A = [[row.get(j, 0) for j in core_cols] for row in core_rows]
    core_vars = tuple(system.variables[j] for j in core_cols)
    if core_rows:
        result = solve_core(A, core_rhs, core_vars)
        if result.status == "infeasible":
            return result
        values = {j: result.solution[system.variables[j]] for j in core_cols}
        certificate = result.certificate
    else:
        values = {}
        certificate = None

    # Untouched free variables default to 0, then substitutions unwind.
    for col, c, expr, val in reversed(subs):
        acc = val - sum(v * values.get(j, 0) for j, v in expr.items())
        values[col] = acc * c  # 1/c == c for unit c
    solution = {v: values.get(j, 0) for j, v in enumerate(system.variables)}
    if not system.check_solution(solution):
        raise AssertionError("presolve produced a non-solution")
    return IntSolveResult("solution", solution, certificate)


def solve_with_pins(system, pins, presolve=True):
    """Solve with some variables fixed: substitute and move to the rhs."""
    pin_cols = {system.var_index[v]: int(val) for v, val in pins.items()}
    keep = [j for j in range(len(system.variables)) if j not in pin_cols]
    remap = {j: k for k, j in enumerate(keep)}
    pinned = LinearSystemZ.empty(tuple(system.variables[j] for j in keep))
    for row, b in zip(system.rows, system.rhs):
        new = {}
        shift = 0
        for j, c in row.items():
            if j in pin_cols:
                shift += c * pin_cols[j]
            else:
                new[remap[j]] = c
        pinned.rows.append(new)
        pinned.rhs.append(b - shift)
    result = solve_integer(pinned, presolve=presolve)
    if result.status != "solution":
        return result
    full = dict(result.solution)
    for j, val in pin_cols.items():
        full[system.variables[j]] = val
    if not system.check_solution(full):
        raise AssertionError("pinned solve produced a non-solution")
    return IntSolveResult("solution", full, result.certificate)
