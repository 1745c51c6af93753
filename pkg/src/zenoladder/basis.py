"""Hilbert-space encoding for the two-leg Ising ladder.

Each rung carries a (sigma, tau) pair of spin-1/2's.  A basis state of L
rungs is encoded as index = sum_i 4^i * (2*sigma_i + tau_i), rung 0 being
the leftmost rung and the least significant digit.  Bit value 1 means
z-eigenvalue +1, bit value 0 means -1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

Rung = tuple[int, int]
Sector = tuple[int, ...]


def n_states(L: int) -> int:
    return 4**L


def encode(rungs) -> int:
    """Map a list of (sigma, tau) bit pairs to a basis index."""
    idx = 0
    for i, (s, t) in enumerate(rungs):
        if s not in (0, 1) or t not in (0, 1):
            raise ValueError(f"rung {i}: bits must be 0 or 1, got {(s, t)}")
        idx += 4**i * (2 * s + t)
    return idx


def decode(index: int, L: int) -> tuple[Rung, ...]:
    """Inverse of encode."""
    if not 0 <= index < 4**L:
        raise ValueError(f"index {index} out of range for L={L}")
    rungs = []
    for _ in range(L):
        d = index % 4
        rungs.append((d >> 1, d & 1))
        index //= 4
    return tuple(rungs)


def parse_state_string(bits: str) -> int:
    """Concatenated-bit notation, e.g. '0001' = rung0 (0,0), rung1 (0,1)."""
    if len(bits) % 2 != 0 or not set(bits) <= {"0", "1"}:
        raise ValueError(f"bad state string {bits!r}")
    pairs = [(int(bits[2 * i]), int(bits[2 * i + 1])) for i in range(len(bits) // 2)]
    return encode(pairs)


def state_string(index: int, L: int) -> str:
    return "".join(f"{s}{t}" for s, t in decode(index, L))


def sector_of(index: int, L: int) -> Sector:
    """Per-rung eigenvalues of sigma^z tau^z (+1 iff the two bits agree)."""
    return tuple(1 if s == t else -1 for s, t in decode(index, L))


def sector_to_string(sector: Sector) -> str:
    return "".join("+" if s > 0 else "-" for s in sector)


def sector_from_string(text: str) -> Sector:
    """Parse '+-+' style labels; unicode minus accepted."""
    signs = []
    for ch in text.strip():
        if ch == "+":
            signs.append(1)
        elif ch in "-−–":
            signs.append(-1)
        else:
            raise ValueError(f"bad sector character {ch!r} in {text!r}")
    return tuple(signs)


def sector_id(sector: Sector) -> int:
    """Integer label: bit i set iff sign i is +1."""
    return sum(1 << i for i, s in enumerate(sector) if s > 0)


def sector_from_id(sid: int, L: int) -> Sector:
    return tuple(1 if (sid >> i) & 1 else -1 for i in range(L))


def all_sectors(L: int) -> list[Sector]:
    return [sector_from_id(sid, L) for sid in range(2**L)]


def sector_basis(sector: Sector) -> np.ndarray:
    """Ascending indices of the 2^L basis states in a sector."""
    digit_choices = [(0, 3) if s > 0 else (1, 2) for s in sector]
    weights = [4**i for i in range(len(sector))]
    indices = [
        sum(w * d for w, d in zip(weights, digits))
        for digits in itertools.product(*digit_choices)
    ]
    return np.array(sorted(indices), dtype=np.int64)


def string_decomposition(sector: Sector) -> list[tuple[int, int]]:
    """Maximal runs of equal sector sign as (start rung, length) pairs."""
    strings = []
    start = 0
    for i in range(1, len(sector) + 1):
        if i == len(sector) or sector[i] != sector[start]:
            strings.append((start, i - start))
            start = i
    return strings


@dataclass(frozen=True)
class ZenoSubspaces:
    """Grouping of all 2^L sectors by the protection-term plateau value."""

    c: Sector
    groups: dict[int, tuple[Sector, ...]]

    @property
    def L(self) -> int:
        return len(self.c)

    def plateau_of(self, sector: Sector) -> int:
        return sum(ci * si for ci, si in zip(self.c, sector))


def zeno_subspaces(c: Sector, L: int | None = None) -> ZenoSubspaces:
    """Group sectors by m = sum_i c_i s_i (the protection-term plateau)."""
    c = tuple(c)
    if L is not None and len(c) != L:
        raise ValueError(f"c has length {len(c)}, expected {L}")
    if any(ci not in (1, -1) for ci in c):
        raise ValueError("c entries must be +-1")
    groups: dict[int, list[Sector]] = {}
    for sector in all_sectors(len(c)):
        m = sum(ci * si for ci, si in zip(c, sector))
        groups.setdefault(m, []).append(sector)
    return ZenoSubspaces(c=c, groups={m: tuple(v) for m, v in sorted(groups.items())})


# -- vectorized per-basis-index lookups ------------------------------------

def rung_digits(L: int) -> np.ndarray:
    """(L, 4^L) array of rung digits for every basis index."""
    idx = np.arange(4**L, dtype=np.int64)
    return np.stack([(idx >> (2 * i)) & 3 for i in range(L)])


def sector_sign_array(L: int) -> np.ndarray:
    """(L, 4^L) array of sigma^z tau^z eigenvalues per rung and index."""
    d = rung_digits(L)
    return np.where((d == 0) | (d == 3), 1, -1)


def sector_id_array(L: int) -> np.ndarray:
    """Per-basis-index sector id (bit i set iff rung i has sign +1)."""
    signs = sector_sign_array(L)
    weights = (1 << np.arange(L, dtype=np.int64))[:, None]
    return np.sum(np.where(signs > 0, weights, 0), axis=0)


def plateau_value_array(c: Sector) -> np.ndarray:
    """Per-basis-index value of sum_i c_i sigma^z_i tau^z_i."""
    signs = sector_sign_array(len(c))
    return np.asarray(c, dtype=np.int64) @ signs
