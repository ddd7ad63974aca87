"""Alice: raw key generation, decoy insertion, and time-bin encoding.

Each information bit occupies one slot of two time bins (early, late):

    0 -> (pulse, empty)
    1 -> (empty, pulse)

A decoy slot is (pulse, pulse).  Slot i owns bins 2i and 2i+1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "DECOY",
    "DecoyStrategy",
    "SlotMap",
    "PulseTrain",
    "generate_raw_bits",
    "insert_decoys",
    "encode",
    "coherent_boundaries",
    "announce_coherence_checks",
]

# slot codes: 0 and 1 are data bits, DECOY marks a decoy slot
DECOY = 2


class DecoyStrategy(Enum):
    NONE = "none"
    SUBSTITUTE_PATTERN = "substitute-pattern"
    FRAME_HEADER = "frame-header"


@dataclass
class SlotMap:
    """Alice's ground truth: one code per slot (0, 1, or DECOY)."""

    codes: np.ndarray

    def __post_init__(self):
        self.codes = np.asarray(self.codes, dtype=np.uint8)
        if self.codes.ndim != 1 or self.codes.size == 0:
            raise ValueError("SlotMap needs a nonempty 1-d code sequence")
        if not np.all(self.codes <= DECOY):
            raise ValueError("slot codes must be 0, 1 or DECOY")

    @property
    def n_slots(self) -> int:
        return int(self.codes.size)

    @property
    def is_decoy(self) -> np.ndarray:
        return self.codes == DECOY

    @property
    def data_slots(self) -> np.ndarray:
        """Indices of slots carrying a key bit."""
        return np.flatnonzero(self.codes != DECOY)

    def bit_at(self, slot: int) -> int:
        if self.codes[slot] == DECOY:
            raise ValueError(f"slot {slot} is a decoy, not a data bit")
        return int(self.codes[slot])

    def bin_occupancy(self) -> np.ndarray:
        """Boolean per-bin source occupancy, length 2 * n_slots."""
        occ = np.zeros(2 * self.n_slots, dtype=bool)
        occ[0::2] = (self.codes == 0) | (self.codes == DECOY)
        occ[1::2] = (self.codes == 1) | (self.codes == DECOY)
        return occ


@dataclass
class PulseTrain:
    """Time-ordered coherent amplitudes, two bins per slot."""

    means: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=float)
        self.phases = np.asarray(self.phases, dtype=float)
        if self.means.shape != self.phases.shape or self.means.ndim != 1:
            raise ValueError("means and phases must be 1-d arrays of equal length")
        if np.any(self.means < 0):
            raise ValueError("bin means must be >= 0")

    @property
    def n_bins(self) -> int:
        return int(self.means.size)

    @property
    def n_slots(self) -> int:
        return self.n_bins // 2


def generate_raw_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent uniform key bits."""
    if n < 1:
        raise ValueError(f"need at least one bit, got n={n}")
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def insert_decoys(bits, strategy: DecoyStrategy) -> SlotMap:
    """Lay raw bits out into slots, inserting decoys per the chosen strategy.

    NONE               every bit becomes a data slot, in order.
    SUBSTITUTE_PATTERN each non-overlapping occurrence of 1,0,1,0 (scanned
                       left to right) is replaced by four decoy slots; the
                       consumed bits are dropped, so slot count = bit count.
    FRAME_HEADER       frames of four slots, the first of each being a decoy
                       and the rest carrying the next three bits; a final
                       partial frame keeps one leading decoy.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        raise ValueError("bit sequence must be nonempty")
    if not np.all(bits <= 1):
        raise ValueError("bits must be 0 or 1")

    if strategy is DecoyStrategy.NONE:
        return SlotMap(bits.copy())

    if strategy is DecoyStrategy.SUBSTITUTE_PATTERN:
        codes = bits.copy()
        i = 0
        n = bits.size
        while i + 4 <= n:
            if bits[i] == 1 and bits[i + 1] == 0 and bits[i + 2] == 1 and bits[i + 3] == 0:
                codes[i : i + 4] = DECOY
                i += 4
            else:
                i += 1
        return SlotMap(codes)

    if strategy is DecoyStrategy.FRAME_HEADER:
        chunks = []
        for start in range(0, bits.size, 3):
            chunks.append(np.concatenate(([DECOY], bits[start : start + 3])))
        return SlotMap(np.concatenate(chunks).astype(np.uint8))

    raise ValueError(f"unknown decoy strategy: {strategy!r}")


def encode(slot_map: SlotMap, mu: float) -> PulseTrain:
    """Translate slots into the transmitted pulse train at mean photon count mu.

    All nonempty bins share phase 0 (one continuous-wave source).
    """
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    means = slot_map.bin_occupancy().astype(float) * mu
    return PulseTrain(means, np.zeros_like(means))


def coherent_boundaries(slot_map: SlotMap, mu: float = 1.0) -> np.ndarray:
    """Bin indices k where bins k and k+1 are both nonempty at the source.

    These are the decoy-internal pairs plus every 1-then-0 slot boundary;
    only these can show perfect destructive interference at the monitor.
    """
    occ = slot_map.bin_occupancy()
    return np.flatnonzero(occ[:-1] & occ[1:])


def announce_coherence_checks(
    boundaries: np.ndarray, f_coh: float, rng: np.random.Generator
) -> np.ndarray:
    """Uniformly random subset of intact boundaries Alice publishes for checking."""
    if not 0.0 <= f_coh <= 1.0:
        raise ValueError(f"f_coh must be in [0, 1], got {f_coh}")
    boundaries = np.asarray(boundaries, dtype=np.int64)
    if f_coh == 1.0:
        return boundaries.copy()
    keep = rng.random(boundaries.size) < f_coh
    return boundaries[keep]
