"""Elementary symmetric polynomials, Newton tensors and the Garding cone.

Every function accepts stacked inputs: eigenvalue lists of shape ``(..., n)``
and matrices of shape ``(..., n, n)``; leading axes are treated as a batch.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import NamedTuple

import numpy as np

from .errors import DomainError

__all__ = [
    "sigma_all",
    "sigma_k_eigen",
    "sigma_k_matrix",
    "sigma_all_matrix",
    "newton_tensor",
    "polarized_sigma",
    "garding_member",
    "NMGap",
    "newton_maclaurin_gap",
    "sigma_all_without",
]


def _check_k(k: int, n: int, lo: int = 0) -> None:
    if not (lo <= k <= n):
        raise DomainError(f"k={k} outside [{lo}, {n}]")


def sigma_all(lam) -> np.ndarray:
    """Return sigma_0..sigma_n of ``lam`` stacked on the last axis.

    Uses the prefix recurrence e_j(l_1..l_m) = e_j(l_1..l_{m-1}) + l_m e_{j-1}(l_1..l_{m-1}).
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0 or lam.shape[-1] < 1:
        raise DomainError("eigenvalue list must have length >= 1")
    n = lam.shape[-1]
    e = np.zeros(lam.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for m in range(n):
        lm = lam[..., m, None]
        # descending j so e_{j-1} is still the previous prefix value
        e[..., 1 : m + 2] = e[..., 1 : m + 2] + lm * e[..., 0 : m + 1]
    return e


def sigma_k_eigen(lam, k: int):
    """k-th elementary symmetric polynomial of the eigenvalue list ``lam``."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    _check_k(k, n)
    out = sigma_all(lam)[..., k]
    return float(out) if out.ndim == 0 else out


def sigma_all_without(lam) -> np.ndarray:
    """sigma_j of ``lam`` with entry i removed; shape ``(..., n, n)`` indexed [i, j].

    Column j runs over 0..n-1. These are the partial derivatives
    d sigma_{j+1} / d lam_i.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    out = np.zeros(lam.shape + (n,))
    for i in range(n):
        rest = np.delete(lam, i, axis=-1)
        if n == 1:
            out[..., i, 0] = 1.0
        else:
            out[..., i, :] = sigma_all(rest)
    return out


def _newton_cascade(A: np.ndarray, m_max: int):
    """Yield (sigma_m, T_m) for m = 0..m_max via T_m = sigma_m I - A T_{m-1}."""
    n = A.shape[-1]
    eye = np.broadcast_to(np.eye(n), A.shape)
    T = eye.copy()
    s = np.ones(A.shape[:-2])
    yield s, T
    for m in range(1, m_max + 1):
        AT = A @ T
        s = np.trace(AT, axis1=-2, axis2=-1) / m
        T = s[..., None, None] * eye - AT
        yield s, T


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {A.shape}")
    return A


def sigma_all_matrix(A) -> np.ndarray:
    """sigma_0..sigma_n of the eigenvalues of ``A``, by the trace recursion."""
    A = _as_square(A)
    n = A.shape[-1]
    return np.stack([s for s, _ in _newton_cascade(A, n)], axis=-1)


def sigma_k_matrix(A, k: int):
    """sigma_k of the eigenvalues of ``A`` without forming eigenvalues."""
    A = _as_square(A)
    _check_k(k, A.shape[-1])
    for m, (s, _) in enumerate(_newton_cascade(A, k)):
        if m == k:
            return float(s) if s.ndim == 0 else s
    raise AssertionError("unreachable")


def newton_tensor(A, m: int) -> np.ndarray:
    """Newton transformation tensor T_m(A), with T_0 = I."""
    A = _as_square(A)
    _check_k(m, A.shape[-1])
    for j, (_, T) in enumerate(_newton_cascade(A, m)):
        if j == m:
            return T
    raise AssertionError("unreachable")


def polarized_sigma(As) -> float:
    """Multilinear polarization Sigma_m(A_1, ..., A_m) of sigma_m.

    The mixed coefficient of t_1...t_m in sigma_m(sum t_i A_i) is extracted by
    inclusion-exclusion over the 2^m corner evaluations, then divided by (m-1)!.
    """
    mats = [np.asarray(a, dtype=float) for a in As]
    m = len(mats)
    if m < 1:
        raise DomainError("need at least one matrix")
    n = mats[0].shape[-1]
    for a in mats:
        if a.shape != (n, n):
            raise DomainError("matrices must all be n x n with matching n")
    if m > n:
        raise DomainError(f"m={m} exceeds n={n}")
    coeff = 0.0
    for size in range(1, m + 1):
        sign = (-1.0) ** (m - size)
        for subset in itertools.combinations(range(m), size):
            total = sum(mats[i] for i in subset)
            coeff += sign * sigma_k_matrix(total, m)
    fact = 1
    for j in range(2, m):
        fact *= j
    return coeff / fact


def garding_member(lam, k: int):
    """True iff sigma_j(lam) > 0 for every 1 <= j <= k (strict, no slack)."""
    lam = np.asarray(lam, dtype=float)
    _check_k(k, lam.shape[-1], lo=1)
    s = sigma_all(lam)[..., 1 : k + 1]
    out = np.all(s > 0.0, axis=-1)
    return bool(out) if out.ndim == 0 else out


class NMGap(NamedTuple):
    gap: float | np.ndarray
    in_cone: bool | np.ndarray


def newton_maclaurin_gap(lam, k: int) -> NMGap:
    """c_k sigma_k^2 - sigma_{k+1} sigma_{k-1}, with c_k = C(n,k+1)C(n,k-1)/C(n,k)^2.

    Nonnegative inside the Garding cone. Outside, the value is still returned
    and ``in_cone`` is False so callers can detect cone exit.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not (1 <= k <= n - 1):
        raise DomainError(f"k={k} outside [1, {n - 1}]")
    s = sigma_all(lam)
    c = comb(n, k + 1) * comb(n, k - 1) / comb(n, k) ** 2
    gap = c * s[..., k] ** 2 - s[..., k + 1] * s[..., k - 1]
    inside = garding_member(lam, k)
    if np.ndim(gap) == 0:
        return NMGap(float(gap), bool(inside))
    return NMGap(gap, inside)
