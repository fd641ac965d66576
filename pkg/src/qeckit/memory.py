"""Iterated noise-plus-recovery cycles on a stored state.

A memory run starts from a pure state in the code, alternates the noise
channel and the recovery superoperator on its density matrix, and records
the overlap with the initial state after every cycle. The optional
worst-case mode re-minimizes the fidelity over the whole code at every
cycle (two-dimensional codes only, on the standard Bloch grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelSpec, OperatorEnsemble, build_channel, compose, e_error_family, tensor_power, validate_superoperator
from .codes import QuantumCode, builtin_code, repetition_phase_code
from .config import DEFAULT_FIDELITY, DEFAULT_TOL, FidelityConfig
from .errors import CapacityError, NotSuperoperatorError
from .fidelity import _bloch_point, _bloch_states, _coordinate_refine, binomial_fidelity_bound, min_fidelity
from .linalg import PureState, dagger
from .recovery import RecoveryOperator, synthesize_recovery

CYCLE_CAP = 10_000
TRAJECTORY_DIM_CAP = 2**7


@dataclass(frozen=True, eq=False)
class MemoryRun:
    """Fidelity trajectory of an iterated coded memory.

    ``per_cycle_fidelity`` has ``cycles + 1`` entries, starting at 1.0 for
    the initial state itself. ``bound_curve``, when present, is the
    single-cycle tail bound compounded per cycle; the compounding is a
    heuristic, only the single-cycle value is a proven bound.
    ``worst_case_fidelity`` holds per-cycle minima over the code when the
    run was asked for them. ``monotone`` records (without asserting)
    whether the trajectory never increased.
    """

    cycles: int
    per_cycle_fidelity: tuple[float, ...]
    initial_state: PureState
    channel_label: str
    recovery: RecoveryOperator
    bound_curve: tuple[float, ...] | None
    worst_case_fidelity: tuple[float, ...] | None
    max_trace_deviation: float
    min_eigenvalue: float
    monotone: bool


@dataclass(frozen=True, eq=False)
class MemoryComparison:
    """Coded-versus-bare trajectories for one dephasing strength."""

    gamma: float
    cycles: int
    coded: tuple[float, ...]
    uncoded: tuple[float, ...]
    bound_curve: tuple[float, ...]
    coded_dominates: bool
    crossover_cycle: int | None


def _apply_raw(ops: OperatorEnsemble, mat: np.ndarray) -> np.ndarray:
    out = np.zeros_like(mat)
    for a in ops:
        out = out + a @ mat @ dagger(a)
    return out


def _worst_case_values(code: QuantumCode, sector_images: list[np.ndarray], cfg: FidelityConfig) -> float:
    """Minimum of <psi| T^t(|psi><psi|) |psi> over the code, from the evolved sector images."""
    b = code.matrix
    k = code.k
    q = np.array(
        [[dagger(b) @ sector_images[i * k + j] @ b for j in range(k)] for i in range(k)]
    )  # (k, k, k, k): q[i, j, kk, ll]
    if k == 1:
        return float(q[0, 0, 0, 0].real)

    def single(theta: float, phi: float) -> float:
        c = _bloch_point(theta, phi)
        return float(np.einsum("ijkl,i,j,k,l->", q, c, c.conj(), c.conj(), c).real)

    thetas = np.linspace(0.0, math.pi, cfg.grid_theta)
    phis = np.linspace(0.0, 2.0 * math.pi, cfg.grid_phi, endpoint=False)
    states = _bloch_states(thetas, phis)
    values = np.einsum("ijkl,ip,jp,kp,lp->p", q, states, states.conj(), states.conj(), states).real
    flat = int(np.argmin(values))
    t0 = thetas[flat // cfg.grid_phi]
    p0 = phis[flat % cfg.grid_phi]
    _, _, best, _ = _coordinate_refine(
        single, t0, p0, math.pi / max(cfg.grid_theta - 1, 1), 2.0 * math.pi / cfg.grid_phi, cfg.refine_tol
    )
    return best


def run_memory(
    code: QuantumCode,
    channel: OperatorEnsemble,
    recovery: RecoveryOperator,
    initial: PureState,
    cycles: int,
    bound_params: tuple[int, int, float] | None = None,
    worst_case: bool = False,
    cfg: FidelityConfig = DEFAULT_FIDELITY,
) -> MemoryRun:
    """Iterate rho -> recovery(channel(rho)) and track fidelity per cycle.

    Both the channel and the recovery must be trace preserving, and the
    initial state must lie in the code subspace. ``bound_params = (r, e, p)``
    attaches the compounded tail-bound curve.
    """
    if cycles < 0 or cycles > CYCLE_CAP:
        raise ValueError(f"cycles must be in 0..{CYCLE_CAP}, got {cycles}")
    if code.n > TRAJECTORY_DIM_CAP:
        raise CapacityError(f"trajectory runs are capped at dimension {TRAJECTORY_DIM_CAP}")
    if channel.dim != code.n or recovery.dim != code.n:
        raise ValueError("dimension mismatch between code, channel and recovery")
    for name, ens in (("channel", channel), ("recovery", recovery.ensemble)):
        residual = validate_superoperator(ens)
        if residual > DEFAULT_TOL.check:
            raise NotSuperoperatorError(f"{name} is not trace preserving (residual {residual:.3e})")
    psi = initial.amplitudes
    if psi.size != code.n:
        raise ValueError("initial state dimension does not match the code")
    outside = float(np.linalg.norm(psi - code.projector() @ psi))
    if outside > 1e-8:
        raise ValueError(f"initial state is outside the code subspace (residual {outside:.3e})")
    if worst_case and code.k > 2:
        raise ValueError("worst-case trajectories are implemented for codes of dimension <= 2")

    rho = np.outer(psi, psi.conj())
    fidelities = [1.0]
    max_trace_dev = 0.0
    min_eig = 1.0
    b = code.matrix
    sector_images = None
    worst_values = None
    if worst_case:
        sector_images = [np.outer(b[:, i], b[:, j].conj()) for i in range(code.k) for j in range(code.k)]
        worst_values = [_worst_case_values(code, sector_images, cfg)]

    for _ in range(cycles):
        rho = _apply_raw(recovery.ensemble, _apply_raw(channel, rho))
        rho = (rho + dagger(rho)) / 2.0
        fidelities.append(float(np.vdot(psi, rho @ psi).real))
        max_trace_dev = max(max_trace_dev, abs(float(np.trace(rho).real) - 1.0))
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(rho))))
        if worst_case:
            sector_images = [
                _apply_raw(recovery.ensemble, _apply_raw(channel, m)) for m in sector_images
            ]
            worst_values.append(_worst_case_values(code, sector_images, cfg))

    bound = None
    if bound_params is not None:
        r, e, p = bound_params
        bound = tuple(bound_trajectory(r, e, p, cycles))
    monotone = all(fidelities[i + 1] <= fidelities[i] + 1e-12 for i in range(len(fidelities) - 1))
    return MemoryRun(
        cycles=cycles,
        per_cycle_fidelity=tuple(fidelities),
        initial_state=initial,
        channel_label=channel.label,
        recovery=recovery,
        bound_curve=bound,
        worst_case_fidelity=tuple(worst_values) if worst_values is not None else None,
        max_trace_deviation=max_trace_dev,
        min_eigenvalue=min_eig,
        monotone=monotone,
    )


def bound_trajectory(r: int, e: int, p: float, cycles: int) -> list[float]:
    """Single-cycle tail bound raised to the cycle count (heuristic compounding)."""
    single = binomial_fidelity_bound(r, e, p)
    return [single**t for t in range(cycles + 1)]


def identity_recovery(dim: int) -> RecoveryOperator:
    """Do-nothing recovery (the identity channel), for bare-memory baselines."""
    ensemble = OperatorEnsemble((np.zeros((dim, dim), dtype=np.complex128), np.eye(dim, dtype=np.complex128)), label="identity-recovery")
    return RecoveryOperator(
        ensemble=ensemble,
        syndrome_dim=1,
        complement_dim=0,
        syndrome_coefficients=np.ones((1, 1), dtype=np.complex128),
    )


def compare_coded_uncoded(
    gamma: float, cycles: int, cfg: FidelityConfig = DEFAULT_FIDELITY
) -> MemoryComparison:
    """Three-qubit phase-coded memory versus a bare qubit under dephasing.

    Both trajectories are per-cycle worst cases. The coded memory uses the
    synthesized recovery for single phase flips; for small gamma it should
    dominate the bare qubit at every cycle, and the report records (without
    failing) when it does not.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    pm = build_channel(ChannelSpec("decoherence_pm_basis", {"gamma": gamma}))
    code = repetition_phase_code(3)
    noise = tensor_power(pm, 3)
    recovery = synthesize_recovery(code, e_error_family(pm, 3, 1))
    p_flip = (1.0 - math.exp(-gamma)) / 2.0
    coded = run_memory(
        code, noise, recovery, code.basis[0], cycles,
        bound_params=(3, 1, p_flip), worst_case=True, cfg=cfg,
    )

    qubit = builtin_code("trivial(2)")
    bare_channel = build_channel(ChannelSpec("decoherence", {"gamma": gamma}))
    plus = PureState(np.array([1.0, 1.0]) / math.sqrt(2.0), shape=(2,))
    uncoded = run_memory(
        qubit, bare_channel, identity_recovery(2), plus, cycles, worst_case=True, cfg=cfg
    )

    coded_vals = coded.worst_case_fidelity
    uncoded_vals = uncoded.worst_case_fidelity
    crossover = None
    for t, (c, u) in enumerate(zip(coded_vals, uncoded_vals)):
        if c < u - 1e-12:
            crossover = t
            break
    return MemoryComparison(
        gamma=gamma,
        cycles=cycles,
        coded=coded_vals,
        uncoded=uncoded_vals,
        bound_curve=coded.bound_curve,
        coded_dominates=crossover is None,
        crossover_cycle=crossover,
    )


@dataclass(frozen=True, eq=False)
class ScalingFit:
    """Log-log fit of single-cycle infidelity against the dephasing rate."""

    qubits: int
    exponent: float
    constant: float
    gammas: tuple[float, ...]
    infidelities: tuple[float, ...]


def scaling_exponent_fit(
    m: int, gammas=None, cfg: FidelityConfig = DEFAULT_FIDELITY
) -> ScalingFit:
    """Measure how the corrected infidelity scales with the dephasing rate.

    For the m-qubit phase repetition code the infidelity after one cycle
    behaves like a power of gamma; the exponent and constant are fitted
    empirically (log-log least squares) rather than asserted.
    """
    if m not in (1, 3, 5):
        raise ValueError(f"scaling fit supports m in (1, 3, 5), got {m}")
    if gammas is None:
        gammas = np.geomspace(3e-3, 3e-2, 5)
    code = repetition_phase_code(m)
    ys = []
    for gamma in gammas:
        pm = build_channel(ChannelSpec("decoherence_pm_basis", {"gamma": float(gamma)}))
        noise = tensor_power(pm, m)
        recovery = synthesize_recovery(code, e_error_family(pm, m, (m - 1) // 2))
        composite = compose(recovery.ensemble, noise)
        ys.append(1.0 - min_fidelity(code, composite, cfg).value)
    slope, intercept = np.polyfit(np.log(np.asarray(gammas, dtype=float)), np.log(ys), 1)
    return ScalingFit(
        qubits=m,
        exponent=float(slope),
        constant=float(math.exp(intercept)),
        gammas=tuple(float(g) for g in gammas),
        infidelities=tuple(ys),
    )


def trajectory_csv(run: MemoryRun, worst_case: bool = False) -> str:
    """Render a run as CSV with header ``cycle,fidelity,bound`` (17 significant digits)."""
    values = run.worst_case_fidelity if worst_case and run.worst_case_fidelity else run.per_cycle_fidelity
    lines = ["cycle,fidelity,bound"]
    for t, f in enumerate(values):
        bound = f"{run.bound_curve[t]:.17g}" if run.bound_curve is not None else ""
        lines.append(f"{t},{f:.17g},{bound}")
    return "\n".join(lines) + "\n"


def comparison_csv(cmp: MemoryComparison) -> str:
    """CSV with coded and bare worst-case columns plus the heuristic bound curve."""
    lines = ["cycle,coded_fidelity,uncoded_fidelity,bound"]
    for t in range(cmp.cycles + 1):
        lines.append(
            f"{t},{cmp.coded[t]:.17g},{cmp.uncoded[t]:.17g},{cmp.bound_curve[t]:.17g}"
        )
    return "\n".join(lines) + "\n"
