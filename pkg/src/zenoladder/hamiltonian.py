"""Sparse operators for the ladder: H0, perturbations, protection, mirrors.

All operators are real CSR matrices on the full 4^L space (the Y-containing
Heisenberg term is real after the two-site product).  Open boundaries.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from . import basis
from .basis import Sector, ZenoSubspaces

# Single-spin operators in bit order (0 = z-eigenvalue -1, 1 = +1).
_I2 = np.eye(2)
_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]])
_Z = np.diag([-1.0, 1.0])

# 4x4 rung operators; the rung digit is 2*sigma + tau.
SIG = {a: np.kron(m, _I2) for a, m in (("x", _X), ("y", _Y), ("z", _Z))}
TAU = {a: np.kron(_I2, m) for a, m in (("x", _X), ("y", _Y), ("z", _Z))}

PERTURBATION_KINDS = ("transverse", "heisenberg")


def op_chain(L: int, ops: dict[int, np.ndarray]) -> sp.csr_matrix:
    """Kronecker chain with identity on every rung not listed in ops."""
    full = sp.identity(1, format="csr", dtype=np.complex128)
    for i in reversed(range(L)):
        factor = ops.get(i, np.eye(4))
        full = sp.kron(full, sp.csr_matrix(factor), format="csr")
    if full.nnz and np.abs(full.tocoo().data.imag).max() > 1e-15:
        raise ValueError("operator chain is not real")
    out = full.real.tocsr()
    out.eliminate_zeros()
    return out


def _diag(values: np.ndarray) -> sp.csr_matrix:
    return sp.diags(values, format="csr").tocsr()


def build_h0(L: int, J: float = 1.0) -> sp.csr_matrix:
    """-J sum_i (sz sz + tz tz) on legs - J sum_i sx_i tx_i on rungs."""
    if L < 1:
        raise ValueError("L must be >= 1")
    d = basis.rung_digits(L)
    zs = np.where(d >= 2, 1.0, -1.0)      # sigma^z per rung
    zt = np.where(d % 2 == 1, 1.0, -1.0)  # tau^z per rung
    diag = np.zeros(4**L)
    for i in range(L - 1):
        diag -= J * (zs[i] * zs[i + 1] + zt[i] * zt[i + 1])
    h = _diag(diag)
    flip = SIG["x"] @ TAU["x"]  # real 4x4 antidiagonal
    for i in range(L):
        h = h - J * op_chain(L, {i: flip})
    return h.tocsr()


def build_perturbation(kind: str, L: int, lam: float) -> sp.csr_matrix:
    """Sector-off-diagonal perturbation at strength lam."""
    if kind == "transverse":
        h = sp.csr_matrix((4**L, 4**L))
        for i in range(L):
            h = h + op_chain(L, {i: SIG["x"]}) + op_chain(L, {i: TAU["x"]})
        return (lam * h).tocsr()
    if kind == "heisenberg":
        if L < 2:
            raise ValueError("heisenberg perturbation needs L >= 2")
        h = sp.csr_matrix((4**L, 4**L))
        for i in range(L - 1):
            for ops in (SIG, TAU):
                # x_i x_{i+1} + y_i y_{i+1} on one leg; the YY product is real
                h = h + op_chain(L, {i: ops["x"], i + 1: ops["x"]})
                h = h + op_chain(L, {i: ops["y"], i + 1: ops["y"]})
        h.eliminate_zeros()
        return (lam * h).tocsr()
    raise ValueError(f"unknown perturbation kind {kind!r}")


def build_protection(L: int, V: float, c: Sector) -> sp.csr_matrix:
    """Diagonal rung-Ising bias V sum_i c_i sigma^z_i tau^z_i."""
    c = tuple(c)
    if len(c) != L:
        raise ValueError(f"c has length {len(c)}, expected {L}")
    return _diag(V * basis.plateau_value_array(c).astype(float))


def build_mirror_breaker(L: int, epsilon: float) -> sp.csr_matrix:
    """-epsilon sum_i tau^z_i tau^z_{i+1}, breaking the leg-swap symmetry."""
    if L < 2:
        raise ValueError("mirror breaker needs L >= 2")
    d = basis.rung_digits(L)
    zt = np.where(d % 2 == 1, 1.0, -1.0)
    diag = np.zeros(4**L)
    for i in range(L - 1):
        diag -= epsilon * zt[i] * zt[i + 1]
    return _diag(diag)


def build_mirror_swap(L: int) -> sp.csr_matrix:
    """Permutation exchanging sigma and tau on every rung (an involution)."""
    idx = np.arange(4**L, dtype=np.int64)
    swapped = np.zeros_like(idx)
    for i in range(L):
        d = (idx >> (2 * i)) & 3
        ds = ((d & 1) << 1) | (d >> 1)  # digit 1 <-> 2
        swapped += ds << (2 * i)
    dim = 4**L
    return sp.csr_matrix(
        (np.ones(dim), (swapped, idx)), shape=(dim, dim)
    )


def build_zeno_hamiltonian(
    h0: sp.spmatrix,
    h1: sp.spmatrix,
    subspaces: ZenoSubspaces,
    restrict_to: int | None = None,
) -> sp.csr_matrix:
    """H_Z = H0 + sum_S P_S H1 P_S with P_S the plateau projectors."""
    if h0.shape != h1.shape:
        raise ValueError(f"dimension mismatch: {h0.shape} vs {h1.shape}")
    pval = basis.plateau_value_array(subspaces.c)
    if len(pval) != h0.shape[0]:
        raise ValueError("subspaces do not match operator dimension")
    h1 = h1.tocoo()
    keep = pval[h1.row] == pval[h1.col]
    if restrict_to is not None:
        keep &= pval[h1.row] == restrict_to
    projected = sp.csr_matrix(
        (h1.data[keep], (h1.row[keep], h1.col[keep])), shape=h1.shape
    )
    out = (h0 + projected).tocsr()
    out.eliminate_zeros()
    return out


def string_symmetry_operator(L: int, string: tuple[int, int]) -> sp.csr_matrix:
    """Product of sigma^x_i tau^x_i over the rungs of one string."""
    start, length = string
    flip = SIG["x"] @ TAU["x"]
    return op_chain(L, {i: flip for i in range(start, start + length)})


def commutator_norm(a: sp.spmatrix, b: sp.spmatrix) -> float:
    comm = (a @ b - b @ a).tocoo()
    return float(np.abs(comm.data).max(initial=0.0))


def hermiticity_defect(h: sp.spmatrix) -> float:
    diff = (h - h.conjugate().T).tocoo()
    return float(np.abs(diff.data).max(initial=0.0))


def verify_conservation(
    h: sp.spmatrix, L: int, sector: Sector | None = None
) -> dict:
    """Max |[h, .]| against each rung parity and, optionally, each string
    symmetry operator of the given sector.

    The string products are conserved on the sector subspace only (they come
    with domain-wall projectors), so those commutators are evaluated on the
    sector block.
    """
    report: dict = {"rung": [], "string": []}
    for i in range(L):
        parity = op_chain(L, {i: SIG["z"] @ TAU["z"]})
        report["rung"].append(commutator_norm(h, parity))
    if sector is not None:
        idx = basis.sector_basis(sector)
        sub = np.ix_(idx, idx)
        h_block = sp.csr_matrix(h.tocsr()[sub])
        for string in basis.string_decomposition(sector):
            op_block = sp.csr_matrix(string_symmetry_operator(L, string)[sub])
            report["string"].append((string, commutator_norm(h_block, op_block)))
    return report
