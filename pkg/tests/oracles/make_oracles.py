"""Regenerate frozen reference values with independent arbitrary-precision
or brute-force computations. Run: python tests/oracles/make_oracles.py"""
import itertools
import json
from fractions import Fraction
from pathlib import Path

import mpmath

mpmath.mp.dps = 50
P = (1 << 61) - 1


def feige(n, n_prime, alpha, alpha_prime):
    n, n_prime = mpmath.mpf(n), mpmath.mpf(n_prime)
    alpha, alpha_prime = mpmath.mpf(alpha), mpmath.mpf(alpha_prime)
    return (n / n_prime) * mpmath.exp(-((alpha_prime - alpha) ** 2) * n_prime / (2 * (1 - alpha)))


def lagrange_row(k, j):
    """G(j, i) by direct Lagrange products mod P (points 1..3k, message at 1..k)."""
    x = j + 1
    row = []
    for i in range(k):
        num, den = 1, 1
        for m in range(k):
            if m != i:
                num = num * (x - (m + 1)) % P
                den = den * ((i + 1) - (m + 1)) % P
        row.append(num * pow(den, P - 2, P) % P)
    return row


def hypergeom_tail_le(total, bad, draws, honest_max):
    """P[honest <= honest_max] drawing `draws` from `total` with `bad` corrupted."""
    good = total - bad
    acc = mpmath.mpf(0)
    for h in range(0, honest_max + 1):
        b = draws - h
        if 0 <= b <= bad and h <= good:
            acc += mpmath.binomial(good, h) * mpmath.binomial(bad, b)
    return acc / mpmath.binomial(total, draws)


def bitonic_depth_bruteforce(n):
    """Count layers by building the classic iterative bitonic schedule."""
    layers = 0
    size = 2
    while size <= n:
        stride = size // 2
        while stride >= 1:
            layers += 1
            stride //= 2
        size *= 2
    return layers


def main():
    out = {}
    out["feige"] = {
        "4096_64_0.1_third": mpmath.nstr(feige(4096, 64, "0.1", mpmath.mpf(1) / 3), 30),
        "2048_48_0.1_third": mpmath.nstr(feige(2048, 48, "0.1", mpmath.mpf(1) / 3), 30),
        "1024_32_0.05_third": mpmath.nstr(feige(1024, 32, "0.05", mpmath.mpf(1) / 3), 30),
    }
    out["flood_rounds"] = {
        f"{n}_{k}": int(mpmath.ceil(mpmath.log(mpmath.mpf(n) / 4) / mpmath.log(mpmath.mpf(k) / 4))) + 1
        for n in (256, 1024, 2048, 4096) for k in (16, 32, 48, 64)
    }
    out["lecc_rows_k4"] = {str(j): [str(v) for v in lagrange_row(4, j)] for j in range(12)}
    out["lecc_rows_k8"] = {str(j): [str(v) for v in lagrange_row(8, j)] for j in range(24)}
    out["pc_honest_le_40_n2048_k48_a01"] = mpmath.nstr(hypergeom_tail_le(2048, 204, 48, 40), 20)
    out["chi2_crit_df23_p001"] = mpmath.nstr(
        mpmath.findroot(lambda x: mpmath.gammainc(mpmath.mpf(23) / 2, x / 2, regularized=True) - mpmath.mpf("0.01"), 41), 12)
    out["query_count_255_16"] = 16 * int(mpmath.ceil(mpmath.log(4 * 255, 2)))
    out["encoding_bound_255_16"] = mpmath.nstr((1 - mpmath.mpf(63) / 256) ** 160, 20)
    out["bitonic_depth"] = {str(n): bitonic_depth_bruteforce(n) for n in (2, 4, 8, 16, 32, 64, 512)}
    out["subset_count_8_2"] = len(list(itertools.combinations(range(8), 2)))
    out["ell_lemma_4096_64"] = mpmath.nstr(mpmath.log(mpmath.mpf(4096) / 3) / mpmath.log(16), 20)
    out["eps_threshold_k48_a01"] = str((1 - 2 * Fraction(1, 10) - (Fraction(1, 6) - Fraction(1, 10)) / 2) * 48)
    Path(__file__).with_name("frozen.json").write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
