"""Recovery-superoperator synthesis and the equivalent verification routes.

The synthesis follows the constructive argument behind the correctability
conditions: orthonormalize the images {A_a |0_L>} into syndrome frames
|nu_r^0> with coefficients beta[r, a]; the matching frames for every other
logical state are obtained by applying the identical coefficients (the
diagonal condition guarantees the Gram matrices agree), and each recovery
element R_r = sum_i |i_L><nu_r^i| is a projection onto one syndrome sector
followed by the decoding unitary. On the code, R_r A_a then acts as
beta[r, a] times the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import OperatorEnsemble, validate_superoperator
from .codes import KLReport, QuantumCode, kl_check
from .config import DEFAULT_TOL
from .errors import NotCorrectableError, NotSuperoperatorError
from .linalg import dagger, orthonormalize, random_unitary, von_neumann_entropy

# Construction residuals above this indicate the coefficient-replay step
# broke down (inputs violate the correctability conditions more than the
# kl tolerance admitted, or the syndrome frames are too ill-conditioned).
_CONSTRUCTION_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class RecoveryOperator:
    """Recovery superoperator: complement projection plus decoding elements.

    ``ensemble`` holds [O, R_1, ..., R_s]: element 0 projects onto the part
    of the space never reached from the code, and each R_r decodes one
    syndrome sector. ``syndrome_coefficients[r, a]`` is the scalar by which
    R_{r+1} A_a acts on the code.
    """

    ensemble: OperatorEnsemble
    syndrome_dim: int
    complement_dim: int
    syndrome_coefficients: np.ndarray

    @property
    def dim(self) -> int:
        return self.ensemble.dim


@dataclass(frozen=True, eq=False)
class SyndromeDecomposition:
    """Unitary identification of the coding space with (code x syndrome) + rest.

    ``iso_map`` is an n x n unitary whose column i*syndrome_dim + r is the
    frame vector |nu_r^i>, followed by a basis of the unreached complement.
    ``syndrome_vectors[:, a]`` are the coefficients of the syndrome state
    produced by operator a, so that A_a |Psi> = iso(|Psi> (x) |E(a)>) for
    every code state.
    """

    iso_map: np.ndarray
    syndrome_basis: tuple[np.ndarray, ...]
    complement_basis: tuple[np.ndarray, ...]
    syndrome_vectors: np.ndarray
    syndrome_dim: int
    complement_dim: int
    perfect: bool
    max_residual: float


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Residuals of the proportionality check R_r A_a = lambda[r, a] * I on the code."""

    lambda_values: np.ndarray
    max_identity_residual: float
    passed: bool
    route: str
    tol: float


@dataclass(frozen=True, eq=False)
class EntropyReport:
    """Information-route verdict: the entropy gap must equal log2(k) bits."""

    difference_bits: float
    passed: bool
    mixed_codeword_entropy: float
    entangled_image_entropy: float
    tol: float


def _syndrome_frames(code: QuantumCode, errors: OperatorEnsemble, rank_tol: float):
    """Per-logical syndrome frames Q_i (n x s) and shared coefficients C (s x m).

    Q_0 comes from orthonormalizing the images of the first logical state;
    Q_i for i > 0 solves X_i = Q_i C in the least-squares sense, which is
    exact (and Q_i orthonormal) precisely when the correctability conditions
    hold. Returns (frames, C, rank, frame_residual, factor_residual).
    """
    b = code.matrix
    images = [np.column_stack([a @ b[:, i] for a in errors]) for i in range(code.k)]
    basis0, coeff, rank = orthonormalize(list(images[0].T), rank_tol=rank_tol)
    if rank == 0:
        empty = np.zeros((code.n, 0), dtype=np.complex128)
        return [empty] * code.k, coeff, 0, 0.0, float(max(np.max(np.abs(x)) for x in images))

    frames = [np.column_stack(basis0)]
    gram = coeff @ dagger(coeff)
    for i in range(1, code.k):
        frames.append(images[i] @ np.linalg.solve(gram, coeff).conj().T)

    frame_residual = 0.0
    for i, qi in enumerate(frames):
        for j, qj in enumerate(frames):
            block = dagger(qi) @ qj
            target = np.eye(rank) if i == j else np.zeros((rank, rank))
            frame_residual = max(frame_residual, float(np.max(np.abs(block - target))))
    factor_residual = max(
        float(np.max(np.abs(images[i] - frames[i] @ coeff))) for i in range(code.k)
    )
    return frames, coeff, rank, frame_residual, factor_residual


def synthesize_recovery(
    code: QuantumCode,
    errors: OperatorEnsemble,
    tol: float = 1e-9,
    rank_tol: float = DEFAULT_TOL.rank,
    seed: int | None = None,
) -> RecoveryOperator:
    """Construct a recovery superoperator for a correctable (code, errors) pair.

    Raises ``NotCorrectableError`` (carrying the ``KLReport``) when the
    correctability check fails. ``seed`` rotates the syndrome-frame basis by
    a common random unitary; the recovery is non-unique and any such choice
    verifies identically.
    """
    report = kl_check(code, errors, tol)
    if not report.passed:
        raise NotCorrectableError(
            "code does not correct this family "
            f"(offdiag {report.max_offdiag_violation:.3e}, diag {report.max_diag_violation:.3e})",
            report=report,
        )
    frames, coeff, rank, frame_res, factor_res = _syndrome_frames(code, errors, rank_tol)
    if max(frame_res, factor_res) > _CONSTRUCTION_TOL:
        raise NotCorrectableError(
            f"syndrome-frame construction is inconsistent (residual {max(frame_res, factor_res):.3e})"
        )
    if seed is not None and rank > 0:
        w = random_unitary(rank, np.random.default_rng(seed))
        frames = [q @ w for q in frames]
        coeff = dagger(w) @ coeff

    n, k = code.n, code.k
    b = code.matrix
    reached = np.zeros((n, n), dtype=np.complex128)
    elements = []
    for r in range(rank):
        rr = np.zeros((n, n), dtype=np.complex128)
        for i in range(k):
            rr += np.outer(b[:, i], frames[i][:, r].conj())
        elements.append(rr)
    for q in frames:
        reached += q @ dagger(q)
    complement = np.eye(n) - reached
    complement = (complement + dagger(complement)) / 2.0

    ensemble = OperatorEnsemble(
        (complement, *elements), label=f"recovery[{code.label or 'code'}|{errors.label}]"
    )
    return RecoveryOperator(
        ensemble=ensemble,
        syndrome_dim=rank,
        complement_dim=n - k * rank,
        syndrome_coefficients=coeff,
    )


def verify_recovery(
    code: QuantumCode,
    errors: OperatorEnsemble,
    recovery: RecoveryOperator,
    tol: float = 1e-9,
) -> VerificationReport:
    """Check that every composite R_r A_a is a scalar on the code.

    The scalar lambda[r, a] is fitted from the first logical state only and
    then validated against every basis state, so a genuine failure cannot
    average away. The report's residual is the worst norm of
    (R_r A_a - lambda I) applied to a logical state.
    """
    if recovery.dim != code.n or errors.dim != code.n:
        raise ValueError("dimension mismatch between code, errors and recovery")
    b = code.matrix
    num_r, num_a = len(recovery.ensemble), len(errors)
    lam = np.zeros((num_r, num_a), dtype=np.complex128)
    worst = 0.0
    for r, rr in enumerate(recovery.ensemble):
        for a, aa in enumerate(errors):
            image = rr @ (aa @ b)  # n x k
            lam[r, a] = np.vdot(b[:, 0], image[:, 0])
            worst = max(worst, float(np.max(np.linalg.norm(image - lam[r, a] * b, axis=0))))
    return VerificationReport(
        lambda_values=lam,
        max_identity_residual=worst,
        passed=worst < tol,
        route="composite-proportionality",
        tol=tol,
    )


def entangled_state_test(
    code: QuantumCode, composite: OperatorEnsemble, tol: float = 1e-9
) -> bool:
    """Zero-error test on one state: I (x) B must fix the fully entangled codeword sum.

    Builds the (unnormalized) state sum_i |i_L>|i_L> on a doubled space and
    checks that each composite element maps it to a scalar multiple of
    itself; equivalent to the proportionality route.
    """
    if composite.dim != code.n:
        raise ValueError(f"dimension mismatch: composite {composite.dim}, code {code.n}")
    b = code.matrix
    ent = np.zeros((code.n, code.n), dtype=np.complex128)  # axis 0: bystander copy
    for i in range(code.k):
        ent += np.outer(b[:, i], b[:, i])
    scale = float(np.linalg.norm(ent))
    worst = 0.0
    for op in composite:
        image = ent @ op.T  # (I (x) op) acting on the second factor
        lam = np.vdot(ent, image) / (scale * scale)
        worst = max(worst, float(np.linalg.norm(image - lam * ent)) / scale)
    return worst < tol


def syndrome_decomposition(
    code: QuantumCode,
    errors: OperatorEnsemble,
    tol: float = 1e-9,
    rank_tol: float = DEFAULT_TOL.rank,
) -> SyndromeDecomposition:
    """Exhibit the coding space as (code x syndrome space) + unreached rest.

    The construction is attempted directly from the error images and
    validated numerically (frame unitarity and the factorization
    A_a|i_L> = iso(|i_L> (x) |E(a)>)); if the residuals exceed ``tol`` the
    decomposition does not exist and ``NotCorrectableError`` is raised. The
    code is flagged ``perfect`` when nothing is unreached and the syndrome
    vectors span the syndrome space.
    """
    frames, coeff, rank, frame_res, factor_res = _syndrome_frames(code, errors, rank_tol)
    residual = max(frame_res, factor_res)
    if residual > max(tol, _CONSTRUCTION_TOL):
        raise NotCorrectableError(
            f"no code-times-syndrome decomposition: construction residual {residual:.3e}"
        )
    n, k = code.n, code.k
    nu_columns = [frames[i][:, r] for i in range(k) for r in range(rank)]
    full, _, total = orthonormalize(
        nu_columns + [np.eye(n, dtype=np.complex128)[:, j] for j in range(n)], rank_tol=1e-8
    )
    if total != n:  # pragma: no cover - completion always spans
        raise NotCorrectableError("failed to complete the frame basis")
    complement = tuple(full[k * rank:])
    iso = np.column_stack(nu_columns + list(complement)) if nu_columns or complement else np.eye(n)
    unitarity = float(np.max(np.abs(dagger(iso) @ iso - np.eye(n))))
    if unitarity > max(tol, _CONSTRUCTION_TOL):
        raise NotCorrectableError(f"syndrome map is not unitary (residual {unitarity:.3e})")

    spanned = int(np.linalg.matrix_rank(coeff, tol=rank_tol * max(1.0, float(np.max(np.abs(coeff)) if coeff.size else 0.0))))
    perfect = (n - k * rank) == 0 and spanned == rank
    return SyndromeDecomposition(
        iso_map=iso,
        syndrome_basis=tuple(frames[0][:, r] for r in range(rank)),
        complement_basis=complement,
        syndrome_vectors=coeff,
        syndrome_dim=rank,
        complement_dim=n - k * rank,
        perfect=perfect,
        max_residual=max(residual, unitarity),
    )


def entropy_test(
    code: QuantumCode,
    errors: OperatorEnsemble,
    tol: float = 1e-6,
    superop_tol: float = DEFAULT_TOL.check,
) -> EntropyReport:
    """Information-theoretic route: correctability iff the entropy gap is log2(k).

    Compares the entropy of the uniform mixture of corrupted codewords with
    the entropy of the corrupted fully entangled codeword state. Only
    defined for trace-preserving families; incomplete ones are refused
    rather than silently renormalized.
    """
    residual = validate_superoperator(errors)
    if residual > superop_tol:
        raise NotSuperoperatorError(
            f"entropy route needs a superoperator (completeness residual {residual:.3e})"
        )
    b = code.matrix
    n, k = code.n, code.k

    mixed = np.zeros((n, n), dtype=np.complex128)
    for a in errors:
        img = a @ b
        mixed += img @ dagger(img)
    mixed /= k

    ent = np.zeros((n, n), dtype=np.complex128)
    for i in range(k):
        ent += np.outer(b[:, i], b[:, i])
    ent /= np.sqrt(k)
    big = np.zeros((n * n, n * n), dtype=np.complex128)
    for a in errors:
        y = (ent @ a.T).reshape(-1)  # (I (x) A_a) applied to the entangled state
        big += np.outer(y, y.conj())

    s_mixed = von_neumann_entropy(mixed)
    s_entangled = von_neumann_entropy(big)
    diff = s_mixed - s_entangled
    return EntropyReport(
        difference_bits=diff,
        passed=abs(diff - np.log2(k)) < tol,
        mixed_codeword_entropy=s_mixed,
        entangled_image_entropy=s_entangled,
        tol=tol,
    )
