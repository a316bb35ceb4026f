"""Dressed eigenbasis, transition amplitudes and dressed ladder operators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NotFound, NumericalError
from .fockspace import fock_index, ladder_operators
from .hamiltonian import SystemParams, system_hamiltonian

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class DressedBasis:
    energies: np.ndarray
    vectors: np.ndarray  # full_dim x M, columns are eigenvectors
    hamiltonian_norm: float
    parity: np.ndarray | None = None  # +-1 per kept level when sectors were given

    @property
    def M(self) -> int:
        return self.energies.size

    @property
    def full_dim(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class TransitionTable:
    """Position-quadrature matrix elements in the dressed basis.

    ``u1[i, j] = <i|(a1 + a1^dag)|j>`` etc. are stored as full Hermitian
    M x M arrays; the physically used entries are those with ``i > j``.
    ``delta[i, j] = E_i - E_j``.
    """

    energies: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    w: np.ndarray
    parity: np.ndarray | None = None

    @property
    def M(self) -> int:
        return self.energies.size

    @property
    def delta(self) -> np.ndarray:
        return self.energies[:, None] - self.energies[None, :]

    @property
    def degenerate(self) -> np.ndarray:
        """Boolean mask of pairs i > j whose splitting is below ``DEGENERACY_TOL``."""
        lower = np.tril(np.ones((self.M, self.M), dtype=bool), k=-1)
        return lower & (np.abs(self.delta) < DEGENERACY_TOL)

    def pairs(self):
        """Yield ``(i, j)`` for every nondegenerate pair with ``i > j``."""
        deg = self.degenerate
        for i in range(self.M):
            for j in range(i):
                if not deg[i, j]:
                    yield i, j


@dataclass(frozen=True)
class DressedOperators:
    """Energy-lowering ladder operators in the dressed basis (strictly upper triangular)."""

    A1: np.ndarray
    A2: np.ndarray
    B: np.ndarray


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(lead) / lead)[None, :]


def _stable_order(energies: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    # within a degenerate cluster order by dominant bare index
    dominant = np.argmax(np.abs(vectors), axis=0)
    cluster = np.zeros(energies.size, dtype=int)
    for k in range(1, energies.size):
        gap = energies[k] - energies[k - 1]
        cluster[k] = cluster[k - 1] + (gap >= DEGENERACY_TOL)
    return np.lexsort((dominant, cluster))


def _eigh(H):
    try:
        return np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc


def diagonalize(H_s: np.ndarray, M: int | None = None, parity=None) -> DressedBasis:
    """Lowest ``M`` eigenpairs of ``H_s`` in ascending energy order.

    ``parity`` optionally labels each basis state with a conserved +-1
    quantum number; each sector is then diagonalised separately so every
    returned eigenvector has a definite label.
    """
    H_s = np.asarray(H_s)
    n = H_s.shape[0]
    if M is None:
        M = n
    if not 1 <= M <= n:
        raise InvalidArgument(f"M must lie in [1, {n}], got {M}")
    norm = float(np.linalg.norm(H_s, 2))
    if np.max(np.abs(H_s - H_s.conj().T), initial=0.0) > 1e-12 * max(norm, 1.0):
        raise InvalidArgument("Hamiltonian is not Hermitian")

    if parity is None:
        E, V = _eigh(H_s)
        labels = None
    else:
        parity = np.asarray(parity)
        sectors = [np.flatnonzero(parity == s) for s in (1, -1)]
        if np.abs(H_s[np.ix_(sectors[0], sectors[1])]).max(initial=0.0) > 0:
            raise InvalidArgument("Hamiltonian mixes the given parity sectors")
        E = np.empty(n)
        V = np.zeros((n, n), dtype=H_s.dtype)
        labels = np.empty(n, dtype=int)
        col = 0
        for sign, idx in zip((1, -1), sectors):
            e, v = _eigh(H_s[np.ix_(idx, idx)])
            k = slice(col, col + idx.size)
            E[k], labels[k] = e, sign
            V[idx, k] = v
            col += idx.size
        order = np.argsort(E, kind="stable")
        E, V, labels = E[order], V[:, order], labels[order]

    order = _stable_order(E, V)
    E, V = E[order][:M], V[:, order][:, :M]
    V = _fix_phases(V)
    if labels is not None:
        labels = labels[order][:M]

    residual = np.linalg.norm(H_s @ V - V * E[None, :], axis=0)
    if residual.max(initial=0.0) > 1e-9 * max(norm, 1.0):
        raise NumericalError(f"eigenpair residual {residual.max():.3e} too large")
    return DressedBasis(energies=E, vectors=V, hamiltonian_norm=norm, parity=labels)


def transition_amplitudes(basis: DressedBasis, position_ops) -> TransitionTable:
    """Project the bare quadratures ``(x1, x2, xb)`` onto the dressed basis."""
    V = basis.vectors
    x1, x2, xb = position_ops
    proj = lambda x: V.conj().T @ x @ V  # noqa: E731
    return TransitionTable(energies=basis.energies.copy(), u1=proj(x1), u2=proj(x2), w=proj(xb),
                           parity=basis.parity)


def position_operators(params: SystemParams):
    return tuple(a + a.conj().T for a in ladder_operators(params.specs))


def dressed_operators(table: TransitionTable) -> DressedOperators:
    # A = sum_{i>j} <j|x|i> |j><i| lowers energy and kills the dressed vacuum
    return DressedOperators(
        A1=np.triu(table.u1, k=1),
        A2=np.triu(table.u2, k=1),
        B=np.triu(table.w, k=1),
    )


def photon_parity(params: SystemParams) -> np.ndarray:
    """``(-1)^(n1 + n2)`` on the bare Fock basis; conserved by the interaction."""
    d1, d2, dw = (c + 1 for c in params.cutoffs)
    n1, n2, _ = np.meshgrid(np.arange(d1), np.arange(d2), np.arange(dw), indexing="ij")
    return np.where((n1 + n2).ravel() % 2 == 0, 1, -1)


def dress(params: SystemParams, M: int):
    """Diagonalise the system and return ``(basis, table, ops)``."""
    basis = diagonalize(system_hamiltonian(params), M, parity=photon_parity(params))
    table = transition_amplitudes(basis, position_operators(params))
    return basis, table, dressed_operators(table)


def resonance_gap(params: SystemParams) -> float:
    """Splitting of the two levels hybridising bare |2,0,0> and |0,0,1>."""
    specs = params.specs
    E, V = np.linalg.eigh(system_hamiltonian(params))
    weight = (
        np.abs(V[fock_index(2, 0, 0, specs)]) ** 2
        + np.abs(V[fock_index(0, 0, 1, specs)]) ** 2
    )
    k1, k2 = np.argsort(-weight, kind="stable")[:2]
    return float(abs(E[k1] - E[k2]))


def tune_resonance(params: SystemParams, lo: float = 0.49, hi: float = 0.52,
                   step: float = 1e-3) -> float:
    """Scan ``omega1`` and return the value minimising the resonant splitting."""
    if step <= 0 or step > 1e-3:
        raise InvalidArgument(f"scan step must lie in (0, 1e-3], got {step}")
    if not lo < params.Omega / 2 < hi:
        raise InvalidArgument(f"scan [{lo}, {hi}] must bracket Omega/2 = {params.Omega / 2}")
    if params.cutoffs[0] < 2:
        raise InvalidArgument("mode1 cutoff must be >= 2 to host |2,0,0>")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = np.round(lo + step * np.arange(n), 12)
    gaps = np.array([resonance_gap(params.with_(omega1=float(w))) for w in grid])
    k = int(np.argmin(gaps))  # first minimum, i.e. ties go to the lower omega1
    if k == 0 or k == n - 1:
        raise NotFound(
            f"splitting minimum sits on the scan edge ({grid[k]}); widen the scan"
        )
    return float(grid[k])
