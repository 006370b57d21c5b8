"""Closed-form eigenvalue helpers for batched 1x1 / 2x2 symmetric forms.

All functions accept arrays of shape ``(..., d, d)`` with d in {1, 2} and
vectorise over the leading axes.
"""
from __future__ import annotations

import numpy as np


def eigvals_sym(mats: np.ndarray) -> np.ndarray:
    """Eigenvalues of symmetric matrices, ascending, shape ``(..., d)``."""
    mats = np.asarray(mats, dtype=float)
    d = mats.shape[-1]
    if d == 1:
        return mats[..., 0, :]
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 1]
    half = 0.5 * (a + c)
    rad = np.sqrt(np.maximum(0.25 * (a - c) ** 2 + b * b, 0.0))
    return np.stack([half - rad, half + rad], axis=-1)


def min_eig(mats: np.ndarray) -> np.ndarray:
    return eigvals_sym(mats)[..., 0]


def max_eig(mats: np.ndarray) -> np.ndarray:
    return eigvals_sym(mats)[..., -1]


def inv_spd(mats: np.ndarray) -> np.ndarray:
    """Inverse of SPD matrices, shape-preserving."""
    mats = np.asarray(mats, dtype=float)
    d = mats.shape[-1]
    if d == 1:
        return 1.0 / mats
    a = mats[..., 0, 0]
    b = mats[..., 0, 1]
    c = mats[..., 1, 1]
    det = a * c - b * b
    out = np.empty_like(mats)
    out[..., 0, 0] = c / det
    out[..., 1, 1] = a / det
    out[..., 0, 1] = -b / det
    out[..., 1, 0] = -b / det
    return out


def geneig_max(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Largest generalized eigenvalue lambda of ``A v = lambda B v``.

    A symmetric PSD, B symmetric positive definite.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    d = A.shape[-1]
    if d == 1:
        return A[..., 0, 0] / B[..., 0, 0]
    a00, a01, a11 = A[..., 0, 0], A[..., 0, 1], A[..., 1, 1]
    b00, b01, b11 = B[..., 0, 0], B[..., 0, 1], B[..., 1, 1]
    detB = b00 * b11 - b01 * b01
    detA = a00 * a11 - a01 * a01
    m = a00 * b11 + a11 * b00 - 2.0 * a01 * b01
    rad = np.sqrt(np.maximum(m * m - 4.0 * detB * detA, 0.0))
    return (m + rad) / (2.0 * detB)


def spectral_norm(mats: np.ndarray) -> np.ndarray:
    """Largest singular value of (not necessarily symmetric) matrices."""
    mats = np.asarray(mats, dtype=float)
    gram = np.einsum("...ji,...jk->...ik", mats, mats)
    return np.sqrt(np.maximum(max_eig(gram), 0.0))


def quad_form(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """``v^T M v`` along the last axes."""
    return np.einsum("...i,...ij,...j->...", vecs, mats, vecs)


def identity_like(dim: int, shape=()) -> np.ndarray:
    eye = np.eye(dim)
    return np.broadcast_to(eye, tuple(shape) + (dim, dim)).copy()
