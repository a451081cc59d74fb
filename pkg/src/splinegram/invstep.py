"""Incremental inversion of leading principal submatrices by Sherman-Morrison
rank-2 bordered updates, with an independent dense exact oracle.

Writing A_{n+1} as the rank-2 perturbation of blockdiag(A_n, a_{n+1,n+1})
gives the bordered update

    B_{n+1} = [[B_n, 0], [0, 0]]
              + s^{-1} [[ (B_n u)(v^T B_n), -B_n u ],
                        [ -v^T B_n,          1     ]],
    s = a_{n+1,n+1} - v^T B_n u,

where u, v hold the new column/row.  For banded input, u has at most
``bandwidth`` nonzero trailing entries; the fast path skips the structural
zeros and produces bit-identical exact results (adding exact zeros is the
identity).

Matrices here are dense: exact mode uses lists of Fractions, float mode numpy
arrays.  Public (i,j) indices are 1-based to match the formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import ArithmeticFailure, InputError
from .gram import SymBandedMatrix
from .scalars import is_exact


def _is_np(B) -> bool:
    return type(B).__module__.startswith("numpy")


@dataclass(frozen=True)
class BorderVectors:
    """New column u, new row v, and corner entry bordering A_n to A_{n+1}."""

    u: tuple
    v: tuple
    corner: object

    def __post_init__(self):
        if len(self.u) != len(self.v):
            raise InputError("border vectors u and v must have equal length")


@dataclass(frozen=True)
class GrowingInverse:
    """State of the incremental inversion: B = A_n^{-1}, plus opt-in history.

    ``diag_history`` holds (b_{1,1}^1, ..., b_{n,n}^n) and ``col_history`` the
    last column of every intermediate inverse (b_{.,j}^j as a tuple of length
    j) when history retention is on; both are None otherwise.
    """

    n: int
    B: object
    diag_history: tuple | None = None
    col_history: tuple | None = None

    @property
    def last_cols(self):
        """Last two columns of the current B (the banded fast-path inputs)."""
        prev = self.column(self.n - 1) if self.n >= 2 else None
        return (prev, self.column(self.n))

    def entry(self, i: int, j: int):
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise InputError(f"index ({i},{j}) outside [1,{self.n}]^2")
        return self.B[i - 1][j - 1]

    def column(self, j: int) -> tuple:
        if not (1 <= j <= self.n):
            raise InputError(f"column {j} outside [1,{self.n}]")
        return tuple(self.B[i][j - 1] for i in range(self.n))

    def rows(self):
        """Dense inverse as a list of row lists."""
        return [list(row) for row in self.B]


def border_from_matrix(A: SymBandedMatrix, n: int) -> BorderVectors:
    """Border vectors for extending A_n to A_{n+1} (u = v by symmetry)."""
    if not (1 <= n < A.n):
        raise InputError(f"cannot border from {n} in a matrix of size {A.n}")
    u = tuple(A.get(i, n + 1) for i in range(1, n + 1))
    return BorderVectors(u, u, A.get(n + 1, n + 1))


# ---------------------------------------------------------------------------
# Generic dense helpers (lists of scalars, any field)


def _mat_mul(X, Y):
    n, k = len(X), len(Y)
    p = len(Y[0])
    return [[sum(X[i][t] * Y[t][j] for t in range(k)) for j in range(p)] for i in range(n)]


def _dense_inverse_generic(M):
    """Gauss-Jordan with max-|pivot| selection; works over any scalar field.

    Used for small capacitance systems.  Raises ArithmeticFailure on exact
    singularity (zero pivot column).
    """
    n = len(M)
    a = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv_row = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv_row][col] == 0:
            raise ArithmeticFailure("singular matrix in Gauss-Jordan", context=M)
        a[col], a[piv_row] = a[piv_row], a[col]
        piv = a[col][col]
        a[col] = [x / piv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def sm_update(Ainv, U, V):
    """(A + U V^T)^{-1} from A^{-1} by the Sherman-Morrison-Woodbury formula.

    Ainv is dense n x n, U and V are n x j (lists of rows).  Raises
    ArithmeticFailure carrying the j x j capacitance matrix if it is singular.
    """
    n = len(Ainv)
    j = len(U[0]) if U else 0
    if j == 0:
        return [list(row) for row in Ainv]
    AU = _mat_mul(Ainv, U)  # n x j
    cap = [[(1 if r == c else 0) + sum(V[t][r] * AU[t][c] for t in range(n))
            for c in range(j)] for r in range(j)]
    try:
        capinv = _dense_inverse_generic(cap)
    except ArithmeticFailure as exc:
        raise ArithmeticFailure("singular capacitance in sm_update",
                                context=cap) from exc
    VtA = [[sum(V[t][r] * Ainv[t][c] for t in range(n)) for c in range(n)]
           for r in range(j)]
    corr = _mat_mul(_mat_mul(AU, capinv), VtA)
    return [[Ainv[r][c] - corr[r][c] for c in range(n)] for r in range(n)]


def extend_inverse(state: GrowingInverse, border: BorderVectors,
                   fast: bool = True) -> GrowingInverse:
    """One bordered update step: B_n -> B_{n+1}.

    ``fast`` skips multiplications against structural zeros of u/v (the
    banded fast path); results are bit-identical to the full path in exact
    arithmetic.  Raises ArithmeticFailure on a zero update denominator
    (impossible for Gram inputs; asserted, never regularized).
    """
    n = state.n
    if len(border.u) != n:
        raise InputError(f"border length {len(border.u)} != state dimension {n}")
    B = state.B
    if _is_np(B):
        return _extend_float(state, border)
    u, v, corner = border.u, border.v, border.corner
    if fast:
        usup = [j for j in range(n) if u[j] != 0]
        vsup = [j for j in range(n) if v[j] != 0]
    else:
        usup = vsup = range(n)
    w = [sum(B[i][j] * u[j] for j in usup) for i in range(n)]  # B_n u
    z = [sum(v[i] * B[i][j] for i in vsup) for j in range(n)]  # v^T B_n
    s = corner - sum(v[i] * w[i] for i in vsup)
    if s == 0:
        raise ArithmeticFailure("zero denominator in bordered update",
                                step=n + 1, context=corner)
    body = [tuple(B[i][j] + w[i] * z[j] / s for j in range(n)) + (-w[i] / s,)
            for i in range(n)]
    body.append(tuple(-z[j] / s for j in range(n)) + (1 / s,))
    newB = tuple(body)
    diag_hist = col_hist = None
    if state.diag_history is not None:
        diag_hist = state.diag_history + (newB[n][n],)
        col_hist = state.col_history + (tuple(newB[i][n] for i in range(n + 1)),)
    return GrowingInverse(n + 1, newB, diag_hist, col_hist)


def _extend_float(state: GrowingInverse, border: BorderVectors) -> GrowingInverse:
    import numpy as np

    n = state.n
    B = np.asarray(state.B, dtype=float)
    u = np.asarray(border.u, dtype=float)
    v = np.asarray(border.v, dtype=float)
    w = B @ u
    z = v @ B
    s = border.corner - float(v @ w)
    if s == 0.0:
        raise ArithmeticFailure("zero denominator in bordered update",
                                step=n + 1, context=border.corner)
    newB = np.empty((n + 1, n + 1))
    newB[:n, :n] = B + np.outer(w, z) / s
    newB[:n, n] = -w / s
    newB[n, :n] = -z / s
    newB[n, n] = 1.0 / s
    diag_hist = col_hist = None
    if state.diag_history is not None:
        diag_hist = state.diag_history + (newB[n, n],)
        col_hist = state.col_history + (tuple(newB[:, n]),)
    return GrowingInverse(n + 1, newB, diag_hist, col_hist)


def invert_iteratively(A: SymBandedMatrix, keep_history: bool = False) -> GrowingInverse:
    """Invert A by m-1 bordered updates starting from B_1 = (1/a_{1,1}).

    Exact scalars run in rational arithmetic; float matrices use a vectorized
    numpy path with the same update formulas.  Arithmetic failures propagate
    with the failing step index attached.
    """
    if A.get(1, 1) == 0:
        raise ArithmeticFailure("a_{1,1} = 0; cannot start inversion", step=1)
    if A.is_exact_matrix():
        b11 = 1 / Fraction(A.get(1, 1))
        state = GrowingInverse(
            1, ((b11,),),
            diag_history=(b11,) if keep_history else None,
            col_history=((b11,),) if keep_history else None)
        for n in range(1, A.n):
            state = extend_inverse(state, border_from_matrix(A, n))
        return state
    return _invert_float_loop(A, keep_history)


def _invert_float_loop(A: SymBandedMatrix, keep_history: bool) -> GrowingInverse:
    import numpy as np

    m, wband = A.n, A.bandwidth
    B = np.empty((m, m))
    B[0, 0] = 1.0 / float(A.get(1, 1))
    diag_hist = [B[0, 0]] if keep_history else None
    col_hist = [(B[0, 0],)] if keep_history else None
    for n in range(1, m):  # current size n, extending to n+1
        lo = max(0, n - wband)
        u_tail = np.array([float(A.get(i + 1, n + 1)) for i in range(lo, n)])
        wvec = B[:n, lo:n] @ u_tail
        s = float(A.get(n + 1, n + 1)) - float(wvec[lo:n] @ u_tail)
        if s == 0.0:
            raise ArithmeticFailure("zero denominator in bordered update", step=n + 1)
        B[:n, :n] += np.outer(wvec, wvec) / s
        B[:n, n] = -wvec / s
        B[n, :n] = -wvec / s
        B[n, n] = 1.0 / s
        if keep_history:
            diag_hist.append(B[n, n])
            col_hist.append(tuple(B[: n + 1, n]))
    return GrowingInverse(m, B,
                          tuple(diag_hist) if keep_history else None,
                          tuple(col_hist) if keep_history else None)


# ---------------------------------------------------------------------------
# Dense exact oracle


def dense_inverse_oracle(A):
    """Exact inverse by fraction-free Gauss-Jordan elimination.

    Rows are scaled to integers (row lcm of denominators), eliminated with
    Bareiss-style one-step exact divisions, and the result is verified by
    A * Ainv == I before returning.  Accepts a dense list of rows or a
    SymBandedMatrix.  Raises ArithmeticFailure if A is exactly singular.
    """
    if isinstance(A, SymBandedMatrix):
        A = A.to_dense()
    n = len(A)
    rows = [[Fraction(x) for x in row] for row in A]
    if any(len(r) != n for r in rows):
        raise InputError("dense_inverse_oracle requires a square matrix")
    if not all(is_exact(x) for row in A for x in row):
        raise InputError("dense_inverse_oracle requires exact scalars")
    aug = []
    for i, row in enumerate(rows):
        scale = 1
        for x in row:
            scale = scale * x.denominator // gcd(scale, x.denominator)
        irow = [int(x * scale) for x in row]
        aug.append(irow + [scale if j == i else 0 for j in range(n)])

    prev = 1
    for col in range(n):
        if aug[col][col] == 0:
            for r in range(col + 1, n):
                if aug[r][col] != 0:
                    aug[col], aug[r] = aug[r], aug[col]
                    break
            else:
                raise ArithmeticFailure("singular matrix in dense_inverse_oracle",
                                        context=A)
        piv = aug[col][col]
        for r in range(n):
            if r == col:
                continue
            f = aug[r][col]
            row_r, row_c = aug[r], aug[col]
            for j in range(2 * n):
                q, rem = divmod(piv * row_r[j] - f * row_c[j], prev)
                if rem:
                    raise ArithmeticFailure("fraction-free division failed",
                                            step=col, context=A)
                row_r[j] = q
        prev = piv

    inv = []
    for i in range(n):
        d = aug[i][i]
        if d == 0:
            raise ArithmeticFailure("singular matrix in dense_inverse_oracle",
                                    context=A)
        inv.append([Fraction(aug[i][n + j], d) for j in range(n)])

    for i in range(n):  # full verification: A * inv == I
        for j in range(n):
            acc = sum(rows[i][t] * inv[t][j] for t in range(n))
            if acc != (1 if i == j else 0):
                raise ArithmeticFailure("oracle verification A*Ainv != I failed",
                                        context=(i + 1, j + 1))
    return inv


def check_checkerboard(B, tol=0):
    """Check (-1)^{i+j} b_{i,j} >= 0 for all entries.

    Returns (passed, witness) with witness the first violating 1-based (i,j)
    in row-major order, or None.  ``tol`` allows float-mode noise; exact mode
    uses the default 0.
    """
    n = len(B)
    for i in range(n):
        row = B[i]
        for j in range(len(row)):
            signed = row[j] if (i + j) % 2 == 0 else -row[j]
            if signed < -tol:
                return False, (i + 1, j + 1)
    return True, None


def max_residual(A: SymBandedMatrix, B) -> float:
    """max |B A - I| entry, float mode (test utility for the residual bound)."""
    import numpy as np

    n = A.n
    Ad = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(max(1, i - A.bandwidth), min(n, i + A.bandwidth) + 1):
            Ad[i - 1, j - 1] = float(A.get(i, j))
    Bd = np.asarray(B, dtype=float)
    return float(np.max(np.abs(Bd @ Ad - np.eye(n))))


# ---------------------------------------------------------------------------
# Dumps


def inverse_to_json(state: GrowingInverse) -> dict:
    from .scalars import format_scalar

    entries = []
    for i in range(1, state.n + 1):
        for j in range(i, state.n + 1):
            entries.append([i, j, format_scalar(state.entry(i, j))])
    return {"n": state.n, "bandwidth": state.n - 1, "entries": entries}


def history_to_json(state: GrowingInverse) -> list:
    from .scalars import format_scalar

    if state.diag_history is None:
        raise InputError("history was not retained; rerun with keep_history")
    records = []
    for idx, col in enumerate(state.col_history, start=1):
        records.append({
            "n": idx,
            "b_nn": format_scalar(state.diag_history[idx - 1]),
            "last_col": [format_scalar(x) for x in col],
        })
    return records
