"""Initial-state preparation and unitary time evolution.

Dense path: one eigendecomposition, then phase rotation per time point
(the default up to L=6).  Krylov path: adaptive short-iterate Lanczos
exponentials applied to the sparse matrix (for L=7, 8).
"""

from __future__ import annotations

import hashlib
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import basis, entanglement, hamiltonian
from .analysis import EETimeSeries
from .basis import Sector

DENSE_MAX_L = 6


class KrylovConvergenceError(RuntimeError):
    """Lanczos step failed to reach tolerance at the maximum subspace size."""


@dataclass(frozen=True)
class QuenchSpec:
    """Complete declarative description of one simulation run."""

    L: int
    sector: Sector
    init_kind: str = "random_product"  # random_product | sector_ground | explicit
    seed: int = 0
    perturbation: str | None = None    # transverse | heisenberg
    lam: float = 0.0
    V: float = 0.0
    c: Sector | None = None
    epsilon: float = 0.0
    evolver: str = "dense"             # dense | krylov
    t_max: float = 1e3
    n_times: int = 200
    spacing: str = "log"               # log | linear
    t_min: float = 0.1
    cut: int | None = None
    hamiltonian_kind: str = "full"     # full | zeno

    def __post_init__(self):
        if len(self.sector) != self.L:
            raise ValueError("sector length must equal L")
        if self.c is not None and len(self.c) != self.L:
            raise ValueError("c length must equal L")
        if self.t_max <= 0 or self.n_times < 2:
            raise ValueError("need t_max > 0 and n_times >= 2")
        if self.evolver not in ("dense", "krylov"):
            raise ValueError(f"unknown evolver {self.evolver!r}")
        if self.init_kind not in ("random_product", "sector_ground", "explicit"):
            raise ValueError(f"unknown init kind {self.init_kind!r}")

    @property
    def cut_or_default(self) -> int:
        return self.cut if self.cut is not None else self.L // 2

    def metadata(self) -> dict:
        return {
            "L": self.L,
            "sector": basis.sector_to_string(self.sector),
            "init": self.init_kind,
            "seed": self.seed,
            "perturbation": self.perturbation or "none",
            "lambda": self.lam,
            "V": self.V,
            "c": basis.sector_to_string(self.c) if self.c else "none",
            "epsilon": self.epsilon,
            "evolver": self.evolver,
            "t_max": self.t_max,
            "n_times": self.n_times,
            "spacing": self.spacing,
            "t_min": self.t_min,
            "cut": self.cut_or_default,
            "hamiltonian": self.hamiltonian_kind,
        }


def time_grid(
    t_max: float, n_points: int, spacing: str = "log", t_min: float = 0.1
) -> np.ndarray:
    """Strictly increasing Jt values; log grids start at t_min."""
    if t_max <= 0 or n_points < 2:
        raise ValueError("need t_max > 0 and n_points >= 2")
    if spacing == "log":
        if not 0 < t_min < t_max:
            raise ValueError("log spacing needs 0 < t_min < t_max")
        return np.geomspace(t_min, t_max, n_points)
    if spacing == "linear":
        return np.linspace(0.0, t_max, n_points)
    raise ValueError(f"unknown spacing {spacing!r}")


def log_grid_per_decade(t_min: float, t_max: float, per_decade: int = 20) -> np.ndarray:
    n = max(2, int(np.ceil(np.log10(t_max / t_min) * per_decade)) + 1)
    return np.geomspace(t_min, t_max, n)


# -- initial states --------------------------------------------------------

def random_sector_product_state(
    sector: Sector,
    seed: int | None = None,
    angles: Sequence[tuple[float, float]] | None = None,
) -> np.ndarray:
    """Product over rungs of cos(th)|00> + sin(th) e^{i phi}|11> (sign +)
    or cos(th)|01> + sin(th) e^{i phi}|10> (sign -).

    Angles are drawn from a seeded generator (th uniform on [0, pi/2],
    phi uniform on [0, 2 pi)) unless given explicitly.
    """
    L = len(sector)
    if angles is None:
        rng = np.random.default_rng(seed)
        angles = [(rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi)) for _ in range(L)]
    if len(angles) != L:
        raise ValueError("need one (theta, phi) pair per rung")
    state = np.ones(1, dtype=np.complex128)
    for sign, (theta, phi) in zip(sector[::-1], angles[::-1]):
        rung = np.zeros(4, dtype=np.complex128)
        lo, hi = (0, 3) if sign > 0 else (1, 2)
        rung[lo] = np.cos(theta)
        rung[hi] = np.sin(theta) * np.exp(1j * phi)
        state = np.kron(state, rung)
    return state


def sector_ground_state(
    sector: Sector, h0: sp.spmatrix
) -> tuple[np.ndarray, bool]:
    """Lowest eigenvector of h0 restricted to the sector block.

    Returns (state on the full space, degenerate flag).  Degenerate ground
    spaces are flagged, not resolved; the returned vector is the
    deterministic first one with its largest amplitude made positive real.
    """
    idx = basis.sector_basis(sector)
    block = np.asarray(h0.tocsr()[np.ix_(idx, idx)].todense())
    evals, evecs = np.linalg.eigh(block)
    degenerate = bool(len(evals) > 1 and evals[1] - evals[0] < 1e-10 * max(1.0, abs(evals[0])))
    vec = evecs[:, 0]
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (np.abs(vec[k]) / vec[k])
    state = np.zeros(h0.shape[0], dtype=np.complex128)
    state[idx] = vec
    return state, degenerate


# -- dense propagator ------------------------------------------------------

_EIGH_CACHE: OrderedDict[str, tuple[np.ndarray, np.ndarray]] = OrderedDict()
_EIGH_CACHE_SIZE = 3


def _matrix_digest(h: sp.csr_matrix) -> str:
    m = hashlib.sha1()
    for buf in (h.indptr, h.indices, h.data):
        m.update(np.ascontiguousarray(buf).tobytes())
    return m.hexdigest()


def dense_eigh(h: sp.spmatrix) -> tuple[np.ndarray, np.ndarray]:
    """Cached full eigendecomposition of a (real symmetric) sparse operator."""
    h = h.tocsr()
    key = _matrix_digest(h)
    if key in _EIGH_CACHE:
        _EIGH_CACHE.move_to_end(key)
        return _EIGH_CACHE[key]
    dense = h.toarray()
    if np.iscomplexobj(dense):
        if np.abs(dense.imag).max() > 0:
            raise ValueError("dense path expects a real symmetric operator")
        dense = dense.real
    evals, evecs = sla.eigh(dense, driver="evd")
    _EIGH_CACHE[key] = (evals, evecs)
    while len(_EIGH_CACHE) > _EIGH_CACHE_SIZE:
        _EIGH_CACHE.popitem(last=False)
    return evals, evecs


class DensePropagator:
    """Eigendecomposition-based exact propagator, O(dim^2) per time point."""

    def __init__(self, h: sp.spmatrix):
        self.evals, self.evecs = dense_eigh(h)

    def states_at(self, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """(n_times, dim) array of e^{-i H t} psi0."""
        coeff = self.evecs.T @ psi0
        phases = np.exp(-1j * np.outer(self.evals, np.asarray(times)))
        block = phases * coeff[:, None]
        out = self.evecs @ block.real + 1j * (self.evecs @ block.imag)
        return out.T


# -- Krylov propagator -----------------------------------------------------

def _lanczos_expm(
    matvec, v: np.ndarray, dt: float, tol: float, m_max: int
) -> tuple[np.ndarray, float, int]:
    """One Lanczos step approximating e^{-i H dt} v; returns (w, err, m)."""
    n = len(v)
    vs = np.empty((m_max, n), dtype=np.complex128)
    alpha = np.zeros(m_max)
    beta = np.zeros(m_max)  # beta[j] couples vs[j-1], vs[j]
    vs[0] = v
    w = matvec(v)
    alpha[0] = np.real(np.vdot(vs[0], w))
    w = w - alpha[0] * vs[0]
    m = 1
    err = np.inf
    result = None
    while True:
        b = np.linalg.norm(w)
        t_mat = np.diag(alpha[:m]) + np.diag(beta[1:m], 1) + np.diag(beta[1:m], -1)
        small = sla.expm(-1j * dt * t_mat)[:, 0]
        # residual estimate: weight leaking into the next Krylov vector
        err = abs(b * small[-1]) if m > 1 else np.inf
        result = small
        if b < 1e-12:  # invariant subspace, expansion is exact
            err = 0.0
            break
        if m >= 2 and err < tol:
            break
        if m == m_max:
            break
        beta[m] = b
        vs[m] = w / b
        w = matvec(vs[m]) - beta[m] * vs[m - 1]
        alpha[m] = np.real(np.vdot(vs[m], w))
        w = w - alpha[m] * vs[m]
        m += 1
    out = vs[:m].T @ result
    return out, err, m


def _make_matvec(h: sp.spmatrix):
    h = h.tocsr()
    if np.iscomplexobj(h.data):
        return lambda x: h @ x
    return lambda x: h @ x.real + 1j * (h @ x.imag)


def krylov_evolve(
    h: sp.spmatrix,
    psi0: np.ndarray,
    times: np.ndarray,
    tol: float = 1e-8,
    m_max: int = 48,
) -> Iterator[np.ndarray]:
    """Yield e^{-i H t} psi0 at each grid time via adaptive Lanczos steps."""
    matvec = _make_matvec(h)
    hnorm = float(np.max(np.abs(h).sum(axis=1)))  # Gershgorin bound
    dt_cap = m_max / max(hnorm, 1e-12)
    psi = np.array(psi0, dtype=np.complex128)
    t_now = 0.0
    total = float(times[-1])
    dt_good = dt_cap
    for t_target in times:
        while t_now < t_target - 1e-12 * max(1.0, t_target):
            dt0 = min(t_target - t_now, dt_good)
            dt = dt0
            while True:
                step_tol = max(tol * dt / total, 5e-14)
                w, err, _ = _lanczos_expm(matvec, psi, dt, step_tol, m_max)
                if err <= step_tol:
                    break
                dt *= 0.5
                if dt < 1e-12 * max(1.0, total):
                    raise KrylovConvergenceError(
                        f"Lanczos step failed to converge (err={err:.2e})"
                    )
            if dt < dt0:
                dt_good = dt  # remember the step size that actually converged
            elif dt0 >= 0.99 * dt_good:
                dt_good = min(dt_cap, dt_good * 1.1)
            norm = np.linalg.norm(w)
            if abs(norm - 1.0) > 1e-8:
                raise KrylovConvergenceError(
                    f"norm drift {abs(norm - 1.0):.2e} in Lanczos step"
                )
            psi = w / norm
            t_now += dt
        yield psi.copy()


def iter_evolve(
    state: np.ndarray,
    h: sp.spmatrix,
    times: np.ndarray,
    method: str = "dense",
    tol: float = 1e-8,
    m_max: int = 48,
) -> Iterator[np.ndarray]:
    """Yield the evolved state at each grid time."""
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"initial state norm {norm} is not 1")
    if hamiltonian.hermiticity_defect(h) > 1e-12:
        raise ValueError("Hamiltonian is not Hermitian")
    if method == "dense":
        prop = DensePropagator(h)
        for row in prop.states_at(np.asarray(state, dtype=np.complex128), times):
            yield row
    elif method == "krylov":
        yield from krylov_evolve(h, state, times, tol=tol, m_max=m_max)
    else:
        raise ValueError(f"unknown evolver {method!r}")


def evolve(state, h, times, method: str = "dense", **kw) -> list[np.ndarray]:
    return list(iter_evolve(state, h, times, method=method, **kw))


def coefficients(state: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """<target|state> for a list of basis indices."""
    targets = np.asarray(targets, dtype=np.int64)
    if targets.size and (targets.min() < 0 or targets.max() >= len(state)):
        raise IndexError("target index out of range")
    return np.asarray(state)[targets]


# -- quench driver ---------------------------------------------------------

def build_quench_hamiltonian(spec: QuenchSpec) -> sp.csr_matrix:
    """Assemble H0 (+ perturbation + protection + breaker, or the Zeno form)."""
    h0 = hamiltonian.build_h0(spec.L)
    h1 = None
    if spec.perturbation is not None and spec.lam != 0.0:
        h1 = hamiltonian.build_perturbation(spec.perturbation, spec.L, spec.lam)
    if spec.hamiltonian_kind == "zeno":
        if spec.c is None:
            raise ValueError("zeno hamiltonian needs a c sequence")
        zs = basis.zeno_subspaces(spec.c, spec.L)
        h1 = h1 if h1 is not None else sp.csr_matrix(h0.shape)
        h = hamiltonian.build_zeno_hamiltonian(h0, h1, zs)
    else:
        h = h0
        if h1 is not None:
            h = h + h1
        if spec.V != 0.0:
            if spec.c is None:
                raise ValueError("protection term needs a c sequence")
            h = h + hamiltonian.build_protection(spec.L, spec.V, spec.c)
    if spec.epsilon != 0.0:
        h = h + hamiltonian.build_mirror_breaker(spec.L, spec.epsilon)
    h = h.tocsr()
    h.eliminate_zeros()
    return h


def initial_state(spec: QuenchSpec, state0: np.ndarray | None = None) -> np.ndarray:
    if spec.init_kind == "explicit":
        if state0 is None:
            raise ValueError("explicit init requires a state vector")
        return np.asarray(state0, dtype=np.complex128)
    if spec.init_kind == "sector_ground":
        h0 = hamiltonian.build_h0(spec.L)
        state, _ = sector_ground_state(spec.sector, h0)
        return state
    return random_sector_product_state(spec.sector, seed=spec.seed)


def run_quench(
    spec: QuenchSpec,
    state0: np.ndarray | None = None,
    targets: Sequence[int] | None = None,
) -> EETimeSeries:
    """Evolve per spec and record mid-cut entropy (and target coefficients)."""
    h = build_quench_hamiltonian(spec)
    psi0 = initial_state(spec, state0)
    times = time_grid(spec.t_max, spec.n_times, spec.spacing, spec.t_min)
    cut = spec.cut_or_default
    entropies = np.empty(len(times))
    norm_err = np.empty(len(times))
    coeffs = (
        np.empty((len(times), len(targets)), dtype=np.complex128)
        if targets is not None
        else None
    )
    for k, psi in enumerate(iter_evolve(psi0, h, times, method=spec.evolver)):
        norm_err[k] = abs(np.linalg.norm(psi) - 1.0)
        entropies[k] = entanglement.cut_entropy(psi, cut)
        if coeffs is not None:
            coeffs[k] = coefficients(psi, targets)
    return EETimeSeries(
        times=times,
        entropies=entropies,
        metadata=spec.metadata(),
        norm_errors=norm_err,
        coefficients=coeffs,
        target_indices=tuple(targets) if targets is not None else None,
    )
