"""A small self-contained exact simplex solver over rationals.

Solves min c.x s.t. Ax = b, x >= 0 with two phases and Bland's rule (which
guarantees termination).  Intended for the tiny LPs produced by the mixture
distance oracle; everything is Fraction arithmetic, so zero-distance
instances come out exactly zero.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    for r, line in enumerate(tableau):
        if r != row and line[col] != 0:
            factor = line[col]
            tableau[r] = [v - factor * w for v, w in zip(line, tableau[row])]
    basis[row] = col


def _run_simplex(tableau, basis, num_vars):
    """Iterate on a tableau whose last row is the (negated-cost) objective."""
    while True:
        obj = tableau[-1]
        col = next((j for j in range(num_vars) if obj[j] < 0), None)
        if col is None:
            return
        best_row, best_ratio = None, None
        for r in range(len(tableau) - 1):
            if tableau[r][col] > 0:
                ratio = tableau[r][-1] / tableau[r][col]
                # Bland: smallest ratio, ties broken by smallest basis index.
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[best_row])
                ):
                    best_row, best_ratio = r, ratio
        if best_row is None:
            raise Unbounded
        _pivot(tableau, basis, best_row, col)


def solve_lp(A, b, c) -> tuple[Fraction, list[Fraction]]:
    """Exact optimum of min c.x s.t. Ax = b, x >= 0.

    A is a list of rows; all entries are coerced to Fraction.
    Returns (optimal value, primal solution).
    """
    m = len(A)
    if m == 0:
        raise InputError("empty constraint system")
    n = len(A[0])
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    c = [Fraction(v) for v in c]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    # Phase 1: artificial variable per row.
    total = n + m
    tableau = []
    for i in range(m):
        row = A[i] + [Fraction(1) if j == i else Fraction(0) for j in range(m)]
        row.append(b[i])
        tableau.append(row)
    basis = [n + i for i in range(m)]
    obj = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            obj[j] -= tableau[i][j]
    for j in range(n, total):
        obj[j] = Fraction(0)
    tableau.append(obj)
    _run_simplex(tableau, basis, total)
    if tableau[-1][-1] != 0:
        raise Infeasible
    # Drive remaining artificial variables out of the basis.
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, r, col)
    # Drop rows whose basic variable is still artificial (redundant rows).
    keep = [r for r in range(m) if basis[r] < n]
    tableau = [
        [tableau[r][j] for j in range(n)] + [tableau[r][-1]] for r in keep
    ]
    basis = [basis[r] for r in keep]

    # Phase 2.
    obj = list(c) + [Fraction(0)]
    for r, col in enumerate(basis):
        if obj[col] != 0:
            factor = obj[col]
            obj = [v - factor * w for v, w in zip(obj, tableau[r])]
    tableau.append(obj)
    _run_simplex(tableau, basis, n)
    solution = [Fraction(0)] * n
    for r, col in enumerate(basis):
        solution[col] = tableau[r][-1]
    return -tableau[-1][-1], solution
