"""Polynomials over the field: evaluation, Lagrange interpolation and
Berlekamp-Welch decoding. Coefficient lists are low-degree first."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .field import P, inv, vmul, vpow_table


def poly_eval(coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % P
    return acc


def poly_mul(a, b) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % P
    return out


def poly_divmod(num, den) -> tuple[list[int], list[int]]:
    num = list(num)
    den = _trim(list(den))
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    lead_inv = inv(den[-1])
    quot = [0] * max(1, len(num) - len(den) + 1)
    for shift in range(len(num) - len(den), -1, -1):
        coef = num[shift + len(den) - 1] * lead_inv % P
        quot[shift] = coef
        if coef:
            for k, d in enumerate(den):
                num[shift + k] = (num[shift + k] - coef * d) % P
    return _trim(quot), _trim(num[:len(den) - 1])


def _trim(coeffs: list[int]) -> list[int]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


@lru_cache(maxsize=4096)
def lagrange_coefficients(xs: tuple[int, ...], at: int) -> tuple[int, ...]:
    """Weights w_i with f(at) = sum w_i f(xs[i]) for deg f < len(xs)."""
    weights = []
    for i, xi in enumerate(xs):
        num, den = 1, 1
        for j, xj in enumerate(xs):
            if j != i:
                num = num * (at - xj) % P
                den = den * (xi - xj) % P
        weights.append(num * inv(den) % P)
    return tuple(weights)


def interpolate_at(points, at: int = 0) -> int:
    """Evaluate at `at` the unique polynomial through (x, y) points."""
    xs = tuple(x for x, _ in points)
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation points must be distinct")
    weights = lagrange_coefficients(xs, at % P)
    return sum(w * y for w, (_, y) in zip(weights, points)) % P


def interpolate(points) -> list[int]:
    """Coefficients of the unique polynomial of degree < len(points)."""
    xs = [x for x, _ in points]
    coeffs = [0] * len(points)
    for i, (xi, yi) in enumerate(points):
        basis, den = [1], 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = poly_mul(basis, [(-xj) % P, 1])
                den = den * (xi - xj) % P
        scale = yi * inv(den) % P
        for k, b in enumerate(basis):
            coeffs[k] = (coeffs[k] + scale * b) % P
    return coeffs


def solve_linear(matrix: list[list[int]], rhs: list[int]) -> list[int] | None:
    """Gaussian elimination mod P; returns one solution or None if inconsistent."""
    rows, cols = len(matrix), len(matrix[0]) if matrix else 0
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if aug[i][c] % P), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        scale = inv(aug[r][c])
        aug[r] = [v * scale % P for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(vi - f * vr) % P for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(all(v == 0 for v in row[:cols]) and row[cols] for row in aug):
        return None
    solution = [0] * cols
    for i, c in enumerate(pivots):
        solution[c] = aug[i][cols]
    return solution


def berlekamp_welch(points, degree: int, max_errors: int | None = None) -> list[int] | None:
    """Recover the degree-`degree` polynomial agreeing with all but at most
    max_errors points, or None when no such polynomial is found."""
    count = len(points)
    if max_errors is None:
        max_errors = (count - degree - 1) // 2
    if max_errors < 0 or count < degree + 1 + 2 * max_errors:
        raise ValueError("too few points to correct the requested number of errors")
    for errors in range(max_errors, -1, -1):
        # unknowns: Q (degree + errors + 1 coeffs) and monic E (errors coeffs)
        q_len = degree + errors + 1
        matrix, rhs = [], []
        for x, y in points:
            row = [pow(x, k, P) for k in range(q_len)]
            row += [(-y * pow(x, k, P)) % P for k in range(errors)]
            matrix.append(row)
            rhs.append(y * pow(x, errors, P) % P)
        solution = solve_linear(matrix, rhs)
        if solution is None:
            continue
        q_poly = solution[:q_len]
        e_poly = solution[q_len:] + [1]
        quotient, remainder = poly_divmod(q_poly, e_poly)
        if remainder:
            continue
        quotient = quotient + [0] * (degree + 1 - len(quotient))
        if len(quotient) > degree + 1:
            continue
        mismatches = sum(1 for x, y in points if poly_eval(quotient, x) != y % P)
        if mismatches <= max_errors:
            return quotient
    return None


@lru_cache(maxsize=256)
def parity_check(xs: tuple[int, ...], degree: int) -> np.ndarray:
    """Rows spanning the dual of degree-`degree` evaluations at xs.

    A vector y of evaluations is consistent with some polynomial of that
    degree iff parity_check(xs, degree) @ y == 0.
    """
    count = len(xs)
    if count <= degree + 1:
        return np.zeros((0, count), dtype=np.uint64)
    # dual codeword weights: u_i = 1 / prod_{j != i}(x_i - x_j); rows u_i * x_i^e
    weights = []
    for i, xi in enumerate(xs):
        den = 1
        for j, xj in enumerate(xs):
            if j != i:
                den = den * (xi - xj) % P
        weights.append(inv(den))
    powers = vpow_table(np.array(xs, dtype=np.uint64), count - degree - 2)
    return vmul(powers, np.array(weights, dtype=np.uint64)[:, None]).T.copy()
