"""Entanglement measures and state-comparison utilities.

Concurrence applies to two-qubit states (pure or mixed); the
I-concurrence and entanglement of formation are pure-state measures in
arbitrary dimensions. Normalization divides by the d-dimensional
pure-state maximum so all measures land in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmath import psd_factor
from .states import BipartiteKet, DensityMatrix, as_density

MEASURE_NAMES = ("concurrence", "i_concurrence", "eof", "pconcurrence")

PURITY_GATE = 1.0 - 1e-6
OVERSHOOT_ATOL = 1e-9

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


@dataclass(frozen=True)
class MeasureValue:
    """A raw measure value together with its d-normalized form."""

    raw: float
    normalized: float
    measure_name: str

    def __post_init__(self):
        if self.measure_name not in MEASURE_NAMES:
            raise ValueError(f"unknown measure {self.measure_name!r}")
        if self.raw < 0:
            raise ValueError(f"raw value must be >= 0, got {self.raw!r}")
        if not (0.0 <= self.normalized <= 1.0 + OVERSHOOT_ATOL):
            raise ValueError(f"normalized value {self.normalized!r} outside [0, 1]")


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Concurrence of a two-qubit density matrix.

    C = max(0, l1 - l2 - l3 - l4) where the l_i descend and are the square
    roots of the eigenvalues of the Hermitian PSD sandwich
    sqrt(rho) rho_tilde sqrt(rho), the spin flip being
    rho_tilde = (sy x sy) rho* (sy x sy) with conjugation in the storage
    basis. The l_i are evaluated as the singular values of the complex
    symmetric matrix L^T (sy x sy) L with rho = L L^dag rank-truncated:
    algebraically identical to the sandwich spectrum, but zero eigenvalues
    stay exactly zero instead of picking up sqrt(eps)-sized noise, and no
    non-selfadjoint eigenproblem appears.
    """
    if (rho.dim_a, rho.dim_b) != (2, 2):
        raise ValueError(f"concurrence needs a 2x2 bipartite state, got ({rho.dim_a}, {rho.dim_b})")
    factor = psd_factor(rho.matrix)
    lam = np.zeros(4)
    sigma = np.linalg.svd(factor.T @ _SPIN_FLIP @ factor, compute_uv=False)
    lam[: sigma.shape[0]] = sigma
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _reduced_a_of_pure(state: BipartiteKet | DensityMatrix, caller: str) -> np.ndarray:
    if isinstance(state, BipartiteKet):
        return state.reduced_a()
    pur = purity(state)
    if pur < PURITY_GATE:
        raise ValueError(
            f"{caller} is defined for pure states only: purity {pur:.6f} is below the "
            f"gate {PURITY_GATE}; mixed-state extensions are out of scope"
        )
    return state.reduced("A")


def i_concurrence(state: BipartiteKet | DensityMatrix) -> float:
    """I-concurrence sqrt(2 (1 - Tr rho_A^2)) of a pure state, any dimensions."""
    rho_a = _reduced_a_of_pure(state, "i_concurrence")
    tr2 = float(np.trace(rho_a @ rho_a).real)
    return math.sqrt(max(0.0, 2.0 * (1.0 - tr2)))


def eof_pure(state: BipartiteKet | DensityMatrix) -> float:
    """Entanglement of formation of a pure state: entropy of rho_A in bits.

    Eigenvalues at or below 1e-12 contribute zero (0 log 0 := 0).
    """
    rho_a = _reduced_a_of_pure(state, "eof_pure")
    w = np.linalg.eigvalsh((rho_a + rho_a.conj().T) / 2)
    w = w[w > 1e-12]
    return float(-np.sum(w * np.log2(w)))


def measure_maximum(measure_name: str, d: int) -> float:
    """Pure-state maximum of a measure in d dimensions."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if measure_name == "eof":
        return math.log2(d)
    if measure_name == "i_concurrence":
        return math.sqrt(2.0 * (d - 1) / d)
    if measure_name in ("concurrence", "pconcurrence"):
        return 1.0
    raise ValueError(f"unknown measure {measure_name!r}")


def normalize_measure(raw: float, measure_name: str, d: int) -> float:
    """Divide by the d-dimensional maximum; clamp only roundoff-level overshoot."""
    x = raw / measure_maximum(measure_name, d)
    if x > 1.0 + OVERSHOOT_ATOL or x < -OVERSHOOT_ATOL:
        raise ValueError(f"normalized {measure_name} = {x!r} overshoots [0, 1] beyond {OVERSHOOT_ATOL:.1e}")
    return float(min(1.0, max(0.0, x)))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), ranging from 1/(dimA dimB) to 1."""
    return float(np.trace(rho.matrix @ rho.matrix).real)


def fidelity_to_ket(rho: DensityMatrix, target: BipartiteKet) -> float:
    """Projective fidelity <t| rho |t>."""
    if (rho.dim_a, rho.dim_b) != (target.dim_a, target.dim_b):
        raise ValueError(
            f"dimension mismatch: state ({rho.dim_a}, {rho.dim_b}) vs target ({target.dim_a}, {target.dim_b})"
        )
    v = target.amplitudes
    val = complex(np.vdot(v, rho.matrix @ v))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"fidelity came out non-real: imaginary part {val.imag:.3e}")
    x = val.real
    if x < -1e-10 or x > 1.0 + 1e-10:
        raise ValueError(f"fidelity {x!r} outside [0, 1]")
    return float(min(1.0, max(0.0, x)))


def uhlmann_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Evaluated as the squared nuclear norm of L_rho^dag L_sigma for
    rank-truncated factors rho = L L^dag, which equals the sandwich trace
    without ever squaring near-zero eigenvalues.
    """
    if (rho.dim_a, rho.dim_b) != (sigma.dim_a, sigma.dim_b):
        raise ValueError(
            f"dimension mismatch: ({rho.dim_a}, {rho.dim_b}) vs ({sigma.dim_a}, {sigma.dim_b})"
        )
    overlap = psd_factor(rho.matrix).conj().T @ psd_factor(sigma.matrix)
    f = float(np.linalg.svd(overlap, compute_uv=False).sum() ** 2)
    return min(1.0, max(0.0, f))


def evaluate_measure(
    state: BipartiteKet | DensityMatrix, measure_name: str, d: int | None = None
) -> MeasureValue:
    """Compute a named measure with its normalization; used by the CLI.

    d defaults to min(dimA, dimB). The pconcurrence entry uses the
    identity subspace pairing (the anticorrelated-basis convention).
    """
    if measure_name not in MEASURE_NAMES:
        raise ValueError(f"unknown measure {measure_name!r} (choose from {MEASURE_NAMES})")
    if d is None:
        d = min(state.dim_a, state.dim_b)
    if measure_name == "concurrence":
        raw = wootters_concurrence(as_density(state))
    elif measure_name == "i_concurrence":
        raw = i_concurrence(state)
    elif measure_name == "eof":
        raw = eof_pure(state)
    else:
        from .witness import identity_pairing, pconcurrence_known

        rho = as_density(state)
        if rho.dim_a != rho.dim_b:
            raise ValueError("pconcurrence needs equal side dimensions")
        raw = pconcurrence_known(rho, identity_pairing(rho.dim_a)).pconcurrence
    return MeasureValue(raw=raw, normalized=normalize_measure(raw, measure_name, d), measure_name=measure_name)
