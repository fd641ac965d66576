"""Code subspaces and correctability checks.

A quantum code is a k-dimensional subspace of an n-dimensional coding
space, stored as an explicit orthonormal basis of logical states. The
central check is ``kl_check``: a code extends to one correcting an operator
family {A_a} iff every cross matrix element <i|A_a^dag A_b|j> vanishes for
i != j and the diagonal elements are independent of the logical index.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from itertools import combinations

import numpy as np

from .channels import OperatorEnsemble
from .config import DEFAULT_TOL, ToleranceConfig
from .linalg import DensityMatrix, PureState, QubitSubset, dagger, kron_all, orthonormalize, partial_trace


@dataclass(frozen=True, eq=False)
class QuantumCode:
    """Orthonormal basis of a k-dimensional subspace of an n-dimensional space."""

    basis: tuple[PureState, ...]
    label: str = ""
    tol: InitVar[ToleranceConfig] = DEFAULT_TOL

    def __post_init__(self, tol: ToleranceConfig):
        states = tuple(self.basis)
        if not states:
            raise ValueError("a code needs at least one basis state")
        dim = states[0].dim
        shape = states[0].shape
        for s in states:
            if s.dim != dim:
                raise ValueError("basis states must share one dimension")
            if s.shape != shape:
                raise ValueError("basis states must share one register shape")
        mat = np.column_stack([s.amplitudes for s in states])
        gram = dagger(mat) @ mat
        viol = float(np.max(np.abs(gram - np.eye(len(states)))))
        if viol > tol.norm:
            raise ValueError(f"code basis is not orthonormal (violation {viol:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "basis", states)
        object.__setattr__(self, "_matrix", mat)

    @property
    def n(self) -> int:
        return self.basis[0].dim

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def shape(self) -> tuple[int, ...] | None:
        return self.basis[0].shape

    @property
    def matrix(self) -> np.ndarray:
        """n x k matrix whose columns are the logical basis states."""
        return self._matrix

    def projector(self) -> np.ndarray:
        return self._matrix @ dagger(self._matrix)


@dataclass(frozen=True, eq=False)
class KLReport:
    """Outcome of the correctability conditions for a (code, errors) pair.

    ``lambda_matrix[a, b]`` holds the common value of <i|A_a^dag A_b|i>
    (averaged over the logical index; the spread is what
    ``max_diag_violation`` measures). ``witness`` is the (a, b, i, j) index
    of the worst violation when the check fails.
    """

    passed: bool
    max_offdiag_violation: float
    max_diag_violation: float
    lambda_matrix: np.ndarray
    witness: tuple[int, int, int, int] | None
    tol: float


def kl_check(code: QuantumCode, errors: OperatorEnsemble, tol: float = 1e-9) -> KLReport:
    """Check the correctability conditions for ``code`` against ``errors``.

    Computes every G[a, b, i, j] = <i_L|A_a^dag A_b|j_L>. The check passes
    iff all i != j entries vanish and the diagonal entries do not depend on
    the logical index, both within ``tol`` (absolute; the inputs are unit
    vectors).
    """
    if errors.dim != code.n:
        raise ValueError(f"dimension mismatch: errors {errors.dim}, code {code.n}")
    b = code.matrix
    images = np.stack([a @ b for a in errors])  # (m, n, k)
    gram = np.einsum("ani,bnj->abij", images.conj(), images)

    m, k = len(errors), code.k
    off = np.abs(gram.copy())
    idx = np.arange(k)
    off[:, :, idx, idx] = 0.0
    max_off = float(off.max()) if k > 1 else 0.0
    off_witness = tuple(int(x) for x in np.unravel_index(int(off.argmax()), off.shape))

    diags = gram[:, :, idx, idx]  # (m, m, k)
    spread = np.abs(diags[:, :, :, None] - diags[:, :, None, :])  # (m, m, k, k)
    max_diag = float(spread.max()) if k > 1 else 0.0
    diag_witness = tuple(int(x) for x in np.unravel_index(int(spread.argmax()), spread.shape))

    passed = max_off < tol and max_diag < tol
    witness = None
    if not passed:
        witness = off_witness if max_off >= max_diag else diag_witness
    return KLReport(
        passed=passed,
        max_offdiag_violation=max_off,
        max_diag_violation=max_diag,
        lambda_matrix=diags.mean(axis=2),
        witness=witness,
        tol=tol,
    )


@dataclass(frozen=True, eq=False)
class ReducedDMReport:
    """Outcome of the reduced-density-matrix criterion for e-error correction.

    For every qubit subset U of size 2e the logical states must have (i)
    identical marginals on U and (ii) orthogonally supported marginals on
    the complement of U.
    """

    passed: bool
    max_marginal_mismatch: float
    max_support_overlap: float
    witness_subset: QubitSubset | None
    witness_pair: tuple[int, int] | None
    tol: float


def reduced_dm_check(code: QuantumCode, e: int, tol: float = 1e-9) -> ReducedDMReport:
    """e-error correction criterion via reduced density matrices."""
    if code.shape is None or any(f != 2 for f in code.shape):
        raise ValueError("reduced-density-matrix check requires an all-qubit register shape")
    r = len(code.shape)
    if e < 0 or 2 * e > r:
        raise ValueError(f"need 0 <= 2e <= number of qubits, got e={e}, r={r}")

    densities = [s.density() for s in code.basis]
    max_mismatch = 0.0
    max_overlap = 0.0
    witness_subset: QubitSubset | None = None
    witness_pair: tuple[int, int] | None = None

    def marginals(subset: tuple[int, ...]) -> list[DensityMatrix]:
        return [partial_trace(d, subset) for d in densities]

    for u in combinations(range(1, r + 1), 2 * e):
        on_u = marginals(u)
        complement = tuple(q for q in range(1, r + 1) if q not in u)
        on_comp = marginals(complement)
        for i in range(code.k):
            for j in range(i + 1, code.k):
                mismatch = float(np.max(np.abs(on_u[i].matrix - on_u[j].matrix)))
                overlap = float(np.max(np.abs(on_comp[i].matrix @ on_comp[j].matrix)))
                if mismatch > max_mismatch:
                    max_mismatch, witness_subset, witness_pair = mismatch, QubitSubset(u), (i, j)
                if overlap > max_overlap:
                    max_overlap, witness_subset, witness_pair = overlap, QubitSubset(u), (i, j)

    passed = max_mismatch < tol and max_overlap < tol
    return ReducedDMReport(
        passed=passed,
        max_marginal_mismatch=max_mismatch,
        max_support_overlap=max_overlap,
        witness_subset=None if passed else witness_subset,
        witness_pair=None if passed else witness_pair,
        tol=tol,
    )


def qubit_lower_bound(e: int, k: int) -> int:
    """Minimal qubit count r >= 4e + ceil(log2 k) for an e-error-correcting code."""
    if k < 1 or e < 0:
        raise ValueError(f"need k >= 1 and e >= 0, got k={k}, e={e}")
    return 4 * e + (k - 1).bit_length()


def naive_counting_bound(r: int, e: int, k: int) -> tuple[bool, int, int]:
    """Informational sphere-packing count: k * sum_{j<=e} C(r,j) 3^j <= 2^r.

    The count treats differently-corrupted codewords as independent, which
    the correctability conditions do not force, so failing this bound does
    not prove impossibility; it is reported as a heuristic.
    """
    if r < 0 or e < 0 or k < 1:
        raise ValueError(f"invalid arguments r={r}, e={e}, k={k}")
    lhs = k * sum(math.comb(r, j) * 3**j for j in range(e + 1))
    rhs = 2**r
    return lhs <= rhs, lhs, rhs


_PLUS = np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)
_MINUS = np.array([1.0, -1.0], dtype=np.complex128) / math.sqrt(2.0)


def repetition_phase_code(m: int, tol: ToleranceConfig = DEFAULT_TOL) -> QuantumCode:
    """Phase-flip repetition code on m qubits: logical states (|0> +- |1>)^(x m).

    Majority rule over the +- sign pattern corrects up to (m-1)/2 phase
    flips; m must be odd (and <= 7 under the dimension policy).
    """
    if m % 2 == 0:
        raise ValueError(f"repetition phase code needs odd m, got {m}")
    if m < 1 or m > 7:
        raise ValueError(f"m must be in 1..7, got {m}")
    shape = (2,) * m
    zero = kron_all([_PLUS.reshape(2, 1)] * m).reshape(-1)
    one = kron_all([_MINUS.reshape(2, 1)] * m).reshape(-1)
    return QuantumCode(
        (PureState(zero, shape, tol=tol), PureState(one, shape, tol=tol)),
        label=f"phase{m}",
        tol=tol,
    )


def builtin_code(name: str, tol: ToleranceConfig = DEFAULT_TOL) -> QuantumCode:
    """Catalogued codes: phase3/phase5/phase7, pair, trivial(d)."""
    key = name.strip().lower()
    if key in ("phase3", "phase5", "phase7"):
        return repetition_phase_code(int(key[-1]), tol=tol)
    if key == "pair":
        shape = (2, 2)
        zero = np.zeros(4, dtype=np.complex128)
        zero[0] = 1.0
        one = np.zeros(4, dtype=np.complex128)
        one[3] = 1.0
        return QuantumCode(
            (PureState(zero, shape, tol=tol), PureState(one, shape, tol=tol)),
            label="pair",
            tol=tol,
        )
    if key.startswith("trivial"):
        rest = key[len("trivial"):].strip("():")
        d = int(rest) if rest else 2
        if d < 1:
            raise ValueError(f"trivial code dimension must be >= 1, got {d}")
        shape = (2,) * int(math.log2(d)) if d & (d - 1) == 0 and d > 1 else None
        eye = np.eye(d, dtype=np.complex128)
        states = tuple(PureState(eye[:, i], shape, tol=tol) for i in range(d))
        return QuantumCode(states, label=f"trivial({d})", tol=tol)
    raise ValueError(f"unknown code name {name!r}; known: phase3, phase5, phase7, pair, trivial(d)")


def random_code(
    n: int,
    k: int,
    seed: int,
    shape: tuple[int, ...] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> QuantumCode:
    """Random code: orthonormalized columns of an n x k complex Gaussian matrix.

    The seed is recorded in the label so a failing property trial can be
    replayed exactly.
    """
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    basis, _, rank = orthonormalize(list(g.T), rank_tol=1e-12)
    if rank != k:  # pragma: no cover - zero-probability event
        raise ValueError("random matrix was rank deficient; pick another seed")
    states = tuple(PureState(v, shape, tol=tol) for v in basis)
    return QuantumCode(states, label=f"random(n={n},k={k},seed={seed})", tol=tol)
