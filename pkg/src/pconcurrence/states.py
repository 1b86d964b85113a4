"""Bipartite quantum states: kets, density matrices, parametric families, file I/O.

Basis convention for the down-conversion families: side A is ordered by
decreasing angular-momentum label (+l ... -l) and side B by increasing
label (-l ... +l), so anticorrelated amplitudes sit on matched indices
and the correlation-preserving subspace pairing is the identity matching.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .qmath import partial_trace

KET_NORM_ATOL = 1e-10
HERM_ATOL = 1e-10
TRACE_ATOL = 1e-9
PSD_ATOL = -1e-9


@dataclass(frozen=True)
class BipartiteKet:
    """Pure state of a dimA x dimB system; amplitudes indexed a*dimB + b."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray
    labels_a: tuple[int, ...] | None = None
    labels_b: tuple[int, ...] | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amp)
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError("dimensions must be positive")
        if amp.shape != (self.dim_a * self.dim_b,):
            raise ValueError(
                f"amplitude vector has length {amp.shape}, expected {self.dim_a * self.dim_b}"
            )
        if not np.isfinite(amp).all():
            raise ValueError("amplitudes contain non-finite entries")
        norm2 = float(np.vdot(amp, amp).real)
        if abs(norm2 - 1.0) > KET_NORM_ATOL:
            raise ValueError(f"ket is not normalized: sum |amp|^2 = {norm2!r}")

    def amplitude_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to a (dimA, dimB) matrix."""
        return self.amplitudes.reshape(self.dim_a, self.dim_b)

    def reduced_a(self) -> np.ndarray:
        """Reduced density matrix of side A (dimA x dimA)."""
        psi = self.amplitude_matrix()
        return psi @ psi.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace operator on a dimA x dimB bipartite space."""

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        n = self.dim_a * self.dim_b
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match dims ({self.dim_a}, {self.dim_b})")
        if not np.isfinite(m).all():
            raise ValueError("matrix contains non-finite entries")
        herm_dev = float(np.abs(m - m.conj().T).max())
        if herm_dev > HERM_ATOL:
            raise ValueError(f"not Hermitian: max|m - m^dag| = {herm_dev:.3e}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace is {tr!r}, not 1")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if min_eig < PSD_ATOL:
            raise ValueError(f"not PSD: min eigenvalue = {min_eig:.3e}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def reduced(self, keep: str) -> np.ndarray:
        return partial_trace(self.matrix, (self.dim_a, self.dim_b), keep)


@dataclass(frozen=True)
class SpdcParams:
    """Probability amplitudes of the two-photon qutrit family, both in [0, 1]."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha = {self.alpha!r} outside [0, 1]")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"beta = {self.beta!r} outside [0, 1]")


def make_spdc_qutrit(p: SpdcParams) -> BipartiteKet:
    """Two-photon qutrit (|0,0> + alpha|1,-1> + beta|-1,1>) / sqrt(1+alpha^2+beta^2).

    Side A basis order is (+1, 0, -1), side B is (-1, 0, +1), so the three
    amplitudes land on matched indices (0,0), (1,1), (2,2).
    """
    n = 1.0 / math.sqrt(1.0 + p.alpha**2 + p.beta**2)
    amp = np.zeros(9, dtype=complex)
    amp[0] = n * p.alpha  # |+1>_A |-1>_B
    amp[4] = n            # | 0>_A | 0>_B
    amp[8] = n * p.beta   # |-1>_A |+1>_B
    return BipartiteKet(3, 3, amp, labels_a=(1, 0, -1), labels_b=(-1, 0, 1))


def make_max_entangled(d: int) -> BipartiteKet:
    """Maximally entangled state sum_i |i,i> / sqrt(d)."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    amp = np.zeros(d * d, dtype=complex)
    amp[:: d + 1] = 1.0 / math.sqrt(d)
    return BipartiteKet(d, d, amp)


def make_spdc_qudit(d: int, decay: float) -> BipartiteKet:
    """Anticorrelated qudit sum_l c_l |l,-l> with a Gaussian amplitude envelope.

    c_l is proportional to exp(-l^2 / (2 decay^2)) over the d integer
    angular-momentum labels closest to 0 (for even d the range is one
    step heavier on the positive side). decay -> infinity recovers the
    maximally entangled state.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if decay <= 0:
        raise ValueError(f"decay must be positive, got {decay!r}")
    lvals = tuple(range(d // 2, d // 2 - d, -1))  # descending, e.g. d=3 -> (1, 0, -1)
    weights = np.exp(-np.array(lvals, dtype=float) ** 2 / (2.0 * decay**2))
    weights /= math.sqrt(float(np.sum(weights**2)))
    amp = np.zeros(d * d, dtype=complex)
    amp[:: d + 1] = weights
    return BipartiteKet(d, d, amp, labels_a=lvals, labels_b=tuple(-l for l in lvals))


def density_from_ket(k: BipartiteKet) -> DensityMatrix:
    """Rank-1 projector |psi><psi| as a DensityMatrix."""
    return DensityMatrix(k.dim_a, k.dim_b, np.outer(k.amplitudes, k.amplitudes.conj()))


def validate_density(m: np.ndarray, dims: tuple[int, int]) -> DensityMatrix:
    """Gate an arbitrary matrix into a DensityMatrix.

    Checks Hermiticity, unit trace and positivity against the type
    tolerances, symmetrizes and renormalizes the trace when the deviation
    is within tolerance, and raises naming the violated invariant and its
    magnitude otherwise.
    """
    da, db = dims
    n = da * db
    m = np.asarray(m, dtype=complex)
    if m.shape != (n, n):
        raise ValueError(f"matrix shape {m.shape} does not match dims ({da}, {db})")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    herm_dev = float(np.abs(m - m.conj().T).max())
    if herm_dev > HERM_ATOL:
        raise ValueError(f"Hermiticity violated: max|m - m^dag| = {herm_dev:.3e} exceeds {HERM_ATOL:.1e}")
    m = (m + m.conj().T) / 2
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"unit trace violated: |Tr - 1| = {abs(tr - 1.0):.3e} exceeds {TRACE_ATOL:.1e}")
    m = m / tr
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < PSD_ATOL:
        raise ValueError(f"positivity violated: min eigenvalue = {min_eig:.3e} below {PSD_ATOL:.1e}")
    return DensityMatrix(da, db, m)


# --- state file format ------------------------------------------------------
# {"type": "ket"|"density", "dimA": int, "dimB": int, "data": ...}
# kets: flat list of [re, im] pairs; densities: square nested lists of pairs.


def _c2pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def state_to_dict(state: BipartiteKet | DensityMatrix) -> dict:
    if isinstance(state, BipartiteKet):
        return {
            "type": "ket",
            "dimA": state.dim_a,
            "dimB": state.dim_b,
            "data": [_c2pair(z) for z in state.amplitudes],
        }
    if isinstance(state, DensityMatrix):
        return {
            "type": "density",
            "dimA": state.dim_a,
            "dimB": state.dim_b,
            "data": [[_c2pair(z) for z in row] for row in state.matrix],
        }
    raise TypeError(f"expected BipartiteKet or DensityMatrix, got {type(state).__name__}")


def state_from_dict(obj: dict) -> BipartiteKet | DensityMatrix:
    kind = obj.get("type")
    da, db = int(obj["dimA"]), int(obj["dimB"])
    data = obj["data"]
    if kind == "ket":
        amp = np.array([complex(re, im) for re, im in data])
        return BipartiteKet(da, db, amp)
    if kind == "density":
        m = np.array([[complex(re, im) for re, im in row] for row in data])
        return validate_density(m, (da, db))
    raise ValueError(f"unknown state type {kind!r} (expected 'ket' or 'density')")


def save_state(path: str | Path, state: BipartiteKet | DensityMatrix) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state), indent=2) + "\n", encoding="utf-8")


def load_state(path: str | Path) -> BipartiteKet | DensityMatrix:
    return state_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def as_density(state: BipartiteKet | DensityMatrix) -> DensityMatrix:
    """Coerce a ket or density matrix to a DensityMatrix."""
    if isinstance(state, BipartiteKet):
        return density_from_ket(state)
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"expected BipartiteKet or DensityMatrix, got {type(state).__name__}")
