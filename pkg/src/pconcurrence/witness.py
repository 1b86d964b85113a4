"""Qubit-subspace decomposition of bipartite qudit states.

A d x d state is carved into K = d(d-1)/2 two-qubit sectors per side.
The product of the Wootters concurrences over a bijective pairing of
A-sectors with B-sectors is an entanglement measure that vanishes unless
entanglement survives in every sector, which makes it a dimension
witness. When the correlation-preserving pairing is unknown, the maximum
over all K! pairings is taken, either by enumeration or as an exact
linear-assignment problem on log-concurrences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .measures import fidelity_to_ket, wootters_concurrence
from .states import DensityMatrix, make_max_entangled

WEIGHT_FLOOR = 1e-12

# One forbidden edge must outweigh any achievable log-product: |log C| is
# bounded by ~700 per factor at double precision, K <= 2016 for d <= 64.
_FORBIDDEN_LOG = -1e18


class SubspaceSupportError(ValueError):
    """The state has (numerically) no support on the requested subspace."""


@dataclass(frozen=True, order=True)
class IndexPair:
    """Strictly ordered pair of basis indices on one side."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ValueError(f"need 0 <= lo < hi, got ({self.lo}, {self.hi})")


@dataclass(frozen=True)
class SubspacePairing:
    """Bijection between the K side-A index pairs and the K side-B pairs."""

    pairs: tuple[tuple[IndexPair, IndexPair], ...]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class SubspaceRow:
    a: IndexPair
    b: IndexPair
    concurrence: float
    fidelity: float
    weight: float


@dataclass(frozen=True)
class WitnessReport:
    """Per-subspace concurrence/fidelity rows and their product."""

    subspace_rows: tuple[SubspaceRow, ...]
    pconcurrence: float
    pairing_used: SubspacePairing
    search_mode: str  # known | brute_force | assignment

    def __post_init__(self):
        prod = math.prod(row.concurrence for row in self.subspace_rows)
        if abs(prod - self.pconcurrence) > 1e-9:
            raise ValueError(
                f"pconcurrence {self.pconcurrence!r} does not match row product {prod!r}"
            )


def count_subspaces(d: int) -> int:
    """Number of two-dimensional sectors of a d-dimensional side: d(d-1)/2."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return d * (d - 1) // 2


def enumerate_pairs(d: int) -> list[IndexPair]:
    """All strictly ordered index pairs in lexicographic order."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return [IndexPair(lo, hi) for lo, hi in itertools.combinations(range(d), 2)]


def identity_pairing(d: int) -> SubspacePairing:
    """Match the k-th A-pair with the k-th B-pair (lexicographic order both sides).

    This is the correlation-preserving pairing under the anticorrelated
    basis convention used by the state constructors.
    """
    pairs = enumerate_pairs(d)
    return SubspacePairing(tuple(zip(pairs, pairs)))


def project_subspace(
    rho: DensityMatrix, a: IndexPair, b: IndexPair
) -> tuple[DensityMatrix, float]:
    """Restrict a state to the two-qubit sector (a on side A, b on side B).

    Applies B = (P_a x P_b) with P_a the 2 x dimA selection of rows (lo, hi)
    and returns (B rho B^dag / weight, weight) with weight = Tr(B rho B^dag).
    Subspace coordinates map lo -> 0 and hi -> 1 on each side. Raises
    SubspaceSupportError when the weight underflows; callers treating the
    sector as unentangled score it as concurrence 0.
    """
    if a.hi >= rho.dim_a or b.hi >= rho.dim_b:
        raise ValueError(
            f"pair indices ({a.lo},{a.hi})x({b.lo},{b.hi}) exceed dims ({rho.dim_a}, {rho.dim_b})"
        )
    pa = np.zeros((2, rho.dim_a))
    pa[0, a.lo] = pa[1, a.hi] = 1.0
    pb = np.zeros((2, rho.dim_b))
    pb[0, b.lo] = pb[1, b.hi] = 1.0
    sel = np.kron(pa, pb)
    raw = sel @ rho.matrix @ sel.conj().T
    raw = (raw + raw.conj().T) / 2
    weight = float(np.trace(raw).real)
    if weight < WEIGHT_FLOOR:
        raise SubspaceSupportError(
            f"no support on subspace ({a.lo},{a.hi})x({b.lo},{b.hi}): weight = {weight:.3e}"
        )
    return DensityMatrix(2, 2, raw / weight), weight


_BELL2 = make_max_entangled(2)


def _score_subspace(rho: DensityMatrix, a: IndexPair, b: IndexPair) -> SubspaceRow:
    # Zero-support sectors certainly hold no entanglement: score 0, not error.
    try:
        sub, weight = project_subspace(rho, a, b)
    except SubspaceSupportError:
        return SubspaceRow(a, b, concurrence=0.0, fidelity=0.0, weight=0.0)
    return SubspaceRow(
        a,
        b,
        concurrence=wootters_concurrence(sub),
        fidelity=fidelity_to_ket(sub, _BELL2),
        weight=weight,
    )


def _check_pairing(pairing: SubspacePairing, d: int) -> None:
    expected = set(enumerate_pairs(d))
    a_side = [a for a, _ in pairing.pairs]
    b_side = [b for _, b in pairing.pairs]
    if set(a_side) != expected or len(a_side) != len(expected):
        raise ValueError("pairing does not cover each side-A index pair exactly once")
    if set(b_side) != expected or len(b_side) != len(expected):
        raise ValueError("pairing does not cover each side-B index pair exactly once")


def pconcurrence_known(rho: DensityMatrix, pairing: SubspacePairing) -> WitnessReport:
    """Product of subspace concurrences under a given pairing.

    Each row also reports the fidelity of the projected sector to the
    two-qubit maximally entangled state (in subspace coordinates) and the
    sector weight; weights do not enter the product.
    """
    if rho.dim_a != rho.dim_b:
        raise ValueError(f"need equal side dimensions, got ({rho.dim_a}, {rho.dim_b})")
    _check_pairing(pairing, rho.dim_a)
    rows = tuple(_score_subspace(rho, a, b) for a, b in pairing.pairs)
    return WitnessReport(
        subspace_rows=rows,
        pconcurrence=math.prod(r.concurrence for r in rows),
        pairing_used=pairing,
        search_mode="known",
    )


def _row_table(rho: DensityMatrix) -> list[list[SubspaceRow]]:
    pairs = enumerate_pairs(rho.dim_a)
    return [[_score_subspace(rho, a, b) for b in pairs] for a in pairs]


def _report_from_permutation(
    table: list[list[SubspaceRow]], perm, mode: str
) -> WitnessReport:
    rows = tuple(table[i][j] for i, j in enumerate(perm))
    return WitnessReport(
        subspace_rows=rows,
        pconcurrence=math.prod(r.concurrence for r in rows),
        pairing_used=SubspacePairing(tuple((r.a, r.b) for r in rows)),
        search_mode=mode,
    )


def maximize_over_pairings(table: list[list[SubspaceRow]], mode: str = "auto") -> WitnessReport:
    """Pick the bijection of A-sectors to B-sectors maximizing the product.

    table[i][j] scores A-pair i against B-pair j (lexicographic order on
    both sides). brute_force enumerates every bijection; assignment solves
    the exact equivalent max sum of log-concurrences, with zero entries as
    forbidden edges (when no zero-free bijection exists the maximum is 0).
    auto picks brute_force for K <= 8 and assignment above.
    """
    if mode not in ("brute_force", "assignment", "auto"):
        raise ValueError(f"mode must be brute_force, assignment or auto, got {mode!r}")
    k = len(table)
    if mode == "auto":
        mode = "brute_force" if k <= 8 else "assignment"
    conc = np.array([[row.concurrence for row in line] for line in table])

    if mode == "brute_force":
        best_perm, best_val = None, -1.0
        for perm in itertools.permutations(range(k)):
            val = math.prod(conc[i][j] for i, j in enumerate(perm))
            if val > best_val:
                best_perm, best_val = perm, val
        return _report_from_permutation(table, best_perm, "brute_force")

    log_conc = np.full((k, k), _FORBIDDEN_LOG)
    positive = conc > 0.0
    log_conc[positive] = np.log(conc[positive])
    rows_idx, cols_idx = linear_sum_assignment(log_conc, maximize=True)
    perm = cols_idx[np.argsort(rows_idx)]
    # If any chosen edge is forbidden, no zero-free bijection exists and the
    # row product comes out 0, which is then the true maximum.
    return _report_from_permutation(table, perm, "assignment")


def pconcurrence_search(rho: DensityMatrix, mode: str = "auto") -> WitnessReport:
    """Maximize the concurrence product over all K! subspace pairings."""
    if rho.dim_a != rho.dim_b:
        raise ValueError(f"need equal side dimensions, got ({rho.dim_a}, {rho.dim_b})")
    return maximize_over_pairings(_row_table(rho), mode)


def report_to_dict(report: WitnessReport) -> dict:
    """JSON form of a witness report."""
    return {
        "pconcurrence": float(report.pconcurrence),
        "search_mode": report.search_mode,
        "pairing": [[a.lo, a.hi, b.lo, b.hi] for a, b in report.pairing_used.pairs],
        "subspaces": [
            {
                "a": [r.a.lo, r.a.hi],
                "b": [r.b.lo, r.b.hi],
                "concurrence": float(r.concurrence),
                "fidelity": float(r.fidelity),
                "weight": float(r.weight),
            }
            for r in report.subspace_rows
        ],
    }
