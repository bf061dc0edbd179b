"""Shamir threshold sharing and error-correcting sharing (Reed-Solomon with
Berlekamp-Welch reconstruction), plus batched numpy variants used inside
committees."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import field
from .field import P
from .poly import berlekamp_welch, interpolate_at, lagrange_coefficients, parity_check, poly_eval


class InsufficientShares(ValueError):
    """Raised when fewer than t+1 shares are available."""


class DecodingError(ValueError):
    """Raised when robust reconstruction cannot find a consistent polynomial."""


@dataclass(frozen=True)
class ShareVector:
    threshold: int
    count: int
    shares: tuple[tuple[int, int], ...]

    def __post_init__(self):
        indices = [i for i, _ in self.shares]
        if len(set(indices)) != len(indices):
            raise ValueError("share indices must be distinct")
        if not 1 <= self.threshold + 1 <= self.count:
            raise ValueError("need 1 <= t+1 <= n_s")

    def subset(self, indices) -> "ShareVector":
        keep = set(indices)
        return ShareVector(self.threshold, self.count, tuple(s for s in self.shares if s[0] in keep))

    def replace(self, index: int, value: int) -> "ShareVector":
        return ShareVector(
            self.threshold, self.count,
            tuple((i, value % P if i == index else v) for i, v in self.shares),
        )


def shamir_share(secret: int, t: int, n_s: int, rng: np.random.Generator) -> ShareVector:
    if not 1 <= t + 1 <= n_s < P:
        raise ValueError("need t+1 <= n_s < p")
    coeffs = [secret % P] + [field.random_element(rng) for _ in range(t)]
    return ShareVector(t, n_s, tuple((i, poly_eval(coeffs, i)) for i in range(1, n_s + 1)))


def shamir_recon(sv: ShareVector) -> int:
    if len(sv.shares) < sv.threshold + 1:
        raise InsufficientShares(f"need {sv.threshold + 1} shares, have {len(sv.shares)}")
    return interpolate_at(sv.shares[: sv.threshold + 1], 0)


def ecss_share(secret: int, t: int, n_s: int, rng: np.random.Generator) -> ShareVector:
    if not 3 * t < n_s:
        raise ValueError("error-correcting sharing needs t < n_s/3")
    return shamir_share(secret, t, n_s, rng)


def ecss_recon(sv: ShareVector) -> int:
    """Reconstruct while correcting up to floor((m - t - 1)/2) wrong shares."""
    if len(sv.shares) < sv.threshold + 1:
        raise InsufficientShares(f"need {sv.threshold + 1} shares, have {len(sv.shares)}")
    coeffs = berlekamp_welch(list(sv.shares), sv.threshold)
    if coeffs is None:
        raise DecodingError("shares are not within decoding radius of any polynomial")
    return coeffs[0]


# -- batched sharing of byte strings -------------------------------------------

def share_limbs(limbs: np.ndarray, degree: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Share a (..., L) array of field elements with random degree-`degree`
    polynomials; returns (..., count, L) shares at points 1..count."""
    limbs = np.asarray(limbs, dtype=np.uint64)
    lead = limbs.shape[:-1]
    width = limbs.shape[-1]
    coeffs = field.random_vector(rng, lead + (degree + 1, width))
    coeffs[..., 0, :] = limbs
    vander = field.vpow_table(np.arange(1, count + 1, dtype=np.uint64), degree)  # (count, degree+1)
    flat = np.moveaxis(coeffs.reshape((-1, degree + 1, width)), 1, 0).reshape(degree + 1, -1)
    shares = field.vmatmul(vander, flat).reshape(count, -1, width)
    return np.moveaxis(shares, 0, 1).reshape(lead + (count, width))


def reconstruct_limbs(shares: np.ndarray, present: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Robustly reconstruct batched shares.

    shares: (B, count, L); present: (B, count) bool. Returns (secrets (B, L),
    ok (B,)). A row is ok when at least degree+1 shares are present and they
    decode (after Berlekamp-Welch correction if they are inconsistent).
    """
    shares = np.asarray(shares, dtype=np.uint64)
    present = np.asarray(present, dtype=bool)
    batch, count, width = shares.shape
    secrets = np.zeros((batch, width), dtype=np.uint64)
    ok = np.zeros(batch, dtype=bool)
    patterns: dict[bytes, list[int]] = {}
    for row in range(batch):
        patterns.setdefault(present[row].tobytes(), []).append(row)
    for key, rows in patterns.items():
        mask = np.frombuffer(key, dtype=bool)
        xs = tuple(int(i) + 1 for i in np.flatnonzero(mask))
        if len(xs) < degree + 1:
            continue
        rows_arr = np.array(rows)
        values = shares[rows_arr][:, mask, :]  # (r, m, L)
        weights = np.array(lagrange_coefficients(xs[: degree + 1], 0), dtype=np.uint64)
        # (m, r * L): one column per row and limb
        columns = np.moveaxis(values, 1, 0).reshape(len(xs), -1)
        head = field.vmatmul(weights[None, :], columns[: degree + 1])
        secrets[rows_arr] = head.reshape(len(rows), width)
        ok[rows_arr] = True
        check = parity_check(xs, degree)
        if check.shape[0] == 0:
            continue
        syndromes = field.vmatmul(check, columns).reshape(check.shape[0], len(rows), width)
        bad_rows = rows_arr[np.any(syndromes != 0, axis=(0, 2))]
        for row in bad_rows:
            secrets[row], ok[row] = _robust_row(shares[row][mask], xs, degree)
    return secrets, ok


def _robust_row(values: np.ndarray, xs: tuple[int, ...], degree: int) -> tuple[np.ndarray, bool]:
    out = np.zeros(values.shape[1], dtype=np.uint64)
    max_errors = (len(xs) - degree - 1) // 2
    if max_errors <= 0:
        return out, False
    for limb in range(values.shape[1]):
        points = [(x, int(values[k, limb])) for k, x in enumerate(xs)]
        coeffs = berlekamp_welch(points, degree, max_errors)
        if coeffs is None:
            return out, False
        out[limb] = coeffs[0]
    return out, True


def share_bytes(data: bytes, degree: int, count: int, rng: np.random.Generator) -> np.ndarray:
    limbs = np.array(field.pack_bytes(data) or [0], dtype=np.uint64)
    return share_limbs(limbs[None, :], degree, count, rng)[0]


def reconstruct_bytes(shares: np.ndarray, present: np.ndarray, degree: int, length: int) -> bytes | None:
    secrets, ok = reconstruct_limbs(shares[None], np.asarray(present)[None], degree)
    if not ok[0]:
        return None
    return field.unpack_bytes(secrets[0], length)
