"""Reduced density matrices and von Neumann entropy across rung-aligned cuts.

Entropies are in nats.  Subsystem A is rungs 0..cut-1 (the left block);
with the index layout of `basis` the bipartition is a pure reshape.
"""

from __future__ import annotations

import numpy as np

EIG_CLAMP = 1e-14  # eigenvalues at or below this contribute zero entropy


def _infer_L(state: np.ndarray) -> int:
    L = round(np.log(len(state)) / np.log(4))
    if 4**L != len(state):
        raise ValueError(f"state length {len(state)} is not a power of 4")
    return L


def _amplitude_matrix(state: np.ndarray, cut: int) -> np.ndarray:
    """Reshape amplitudes into a (4^(L-cut), 4^cut) matrix M[b, a]."""
    L = _infer_L(state)
    if not 1 <= cut < L:
        raise ValueError(f"cut {cut} out of range for L={L}")
    return np.reshape(state, (4 ** (L - cut), 4**cut))


def reduced_density_matrix(state: np.ndarray, cut: int) -> np.ndarray:
    """Partial trace over rungs cut..L-1 of a pure state."""
    m = _amplitude_matrix(state, cut)
    return m.T @ m.conj()


def entropy_from_probabilities(p: np.ndarray) -> float:
    p = np.real(p)
    p = p[p > EIG_CLAMP]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr[rho ln rho] of a density matrix with unit trace."""
    trace = np.trace(rho).real
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"density matrix trace {trace} deviates from 1")
    evals = np.linalg.eigvalsh(rho)
    return entropy_from_probabilities(evals)


def schmidt_entropy(state: np.ndarray, cut: int) -> float:
    """Entropy from squared Schmidt values; cross-check of the rdm path."""
    m = _amplitude_matrix(state, cut)
    s = np.linalg.svd(m, compute_uv=False)
    return entropy_from_probabilities(s**2)


def cut_entropy(state: np.ndarray, cut: int) -> float:
    """Mid-cut entropy used by the quench driver (partial-trace path)."""
    return von_neumann_entropy(reduced_density_matrix(state, cut))


def page_value(dim_a: int, dim_b: int) -> float:
    """Mean entropy ln(dim_a) - dim_a/(2 dim_b) of a random pure state."""
    if dim_a > dim_b:
        raise ValueError("page_value requires dim_a <= dim_b")
    return float(np.log(dim_a) - dim_a / (2.0 * dim_b))
