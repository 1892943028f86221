"""
DESCRIPTION

    Propagation of pure states (Schrödinger equation) and density matrices (Lindblad master equation).

    Pure states are propagated by one of three methods:
      - "static": exact eigen-propagation of a time-independent Hamiltonian;
      - "magnus": adaptive fourth-order commutator-free Magnus integrator (two exponentials per step) with a
        step-doubling error estimate; the exponentials are exact, so fast static phases cost nothing;
      - "rk": DOP853 through scipy.integrate.solve_ivp, in the interaction frame of the diagonal of H at mid-grid.
    "auto" picks "static" for a static TimeDependentHamiltonian and "magnus" otherwise.

    Density matrices are vectorised row-major (vec(ρ)[a·d + b] = ρ_ab) and integrated with DOP853 on a prebuilt
    sparse Liouvillian. Time integrals of observables ride along as extra components of the integrated vector.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from ..errors import DimensionMismatchError, IonTransError, NegativeRateError, NormalizationError, StiffnessError
from .hamiltonian import TimeDependentHamiltonian

###############################################################################
# global constants
###############################################################################
DENSE_LIMIT = 800
NORM_TOLERANCE = 1e-8
HERMITICITY_TOLERANCE = 1e-10
MIN_STEP_FRACTION = 1e-12
INITIAL_STEPS = 100
SAFETY = 0.9
MAX_GROWTH = 4.0
MIN_SHRINK = 0.2

_SQRT3_6 = np.sqrt(3.0) / 6.0
MAGNUS_NODES = (0.5 - _SQRT3_6, 0.5 + _SQRT3_6)
MAGNUS_WEIGHTS = (0.25 + _SQRT3_6, 0.25 - _SQRT3_6)

logger = logging.getLogger(__name__)


###############################################################################
# Classes
###############################################################################
@dataclass
class Trajectory:
    """Samples of a propagation.

    states has shape (n_times, d) for one state, (n_times, d, k) for a block of k states and (n_times, d, d) for
    density matrices. accumulators hold running time integrals at the sample times.
    """

    times: np.ndarray
    states: np.ndarray
    observables: Dict[str, np.ndarray] = field(default_factory=dict)
    accumulators: Dict[str, np.ndarray] = field(default_factory=dict)
    method: str = ""
    tol: float = 0.0
    n_steps: int = 0
    n_rejected: int = 0
    max_drift: float = 0.0
    min_eigenvalue: Optional[float] = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def accumulated(self, name: str) -> float:
        return float(self.accumulators[name][-1])


###############################################################################
# Unitary propagation
###############################################################################
def _dense(op) -> np.ndarray:
    return op.toarray() if sp.issparse(op) else np.asarray(op)


def exponential_action(h, dt: float, block: np.ndarray) -> np.ndarray:
    """exp(−i dt H) applied to the columns of block, for a Hermitian H."""
    if h.shape[0] <= DENSE_LIMIT:
        w, v = la.eigh(_dense(h))
        return v @ (np.exp(-1j * dt * w)[:, None] * (v.conj().T @ block))
    return expm_multiply(-1j * dt * sp.csr_matrix(h), block)


def _cf4_step(hamiltonian_at: Callable, t: float, h: float, block: np.ndarray) -> np.ndarray:
    h1 = hamiltonian_at(t + MAGNUS_NODES[0] * h)
    h2 = hamiltonian_at(t + MAGNUS_NODES[1] * h)
    block = exponential_action(MAGNUS_WEIGHTS[0] * h1 + MAGNUS_WEIGHTS[1] * h2, h, block)
    return exponential_action(MAGNUS_WEIGHTS[1] * h1 + MAGNUS_WEIGHTS[0] * h2, h, block)


def _magnus(hamiltonian_at, block, grid, tol, max_step) -> Tuple[List[np.ndarray], int, int]:
    span = grid[-1] - grid[0]
    min_step = MIN_STEP_FRACTION * max(span, 1.0)
    h = min(max_step, span / INITIAL_STEPS)
    t = grid[0]
    samples = [block]
    n_steps = n_rejected = 0
    for target in grid[1:]:
        while target - t > min_step:
            step = min(h, target - t)
            truncated = step < h
            full = _cf4_step(hamiltonian_at, t, step, block)
            midpoint = _cf4_step(hamiltonian_at, t, 0.5 * step, block)
            half = _cf4_step(hamiltonian_at, t + 0.5 * step, 0.5 * step, midpoint)
            error = float(np.max(np.linalg.norm(full - half, axis=0))) / 15.0

            accepted = error <= tol
            if accepted:
                t += step
                block = half
                n_steps += 1
            else:
                n_rejected += 1
                if step <= min_step:
                    raise StiffnessError("Magnus step size underflow", t)

            factor = MAX_GROWTH if error == 0.0 else min(MAX_GROWTH, max(MIN_SHRINK, SAFETY * (tol / error) ** 0.2))
            proposal = min(max_step, step * factor)
            h = max(h, proposal) if (accepted and truncated) else proposal
        t = target
        samples.append(block)
    return samples, n_steps, n_rejected


def _static(hamiltonian, block, grid) -> List[np.ndarray]:
    if hamiltonian.shape[0] <= DENSE_LIMIT:
        w, v = la.eigh(_dense(hamiltonian))
        coefficients = v.conj().T @ block
        return [v @ (np.exp(-1j * (t - grid[0]) * w)[:, None] * coefficients) for t in grid]
    samples = [block]
    for t_prev, t_next in zip(grid[:-1], grid[1:]):
        samples.append(exponential_action(hamiltonian, t_next - t_prev, samples[-1]))
    return samples


def _runge_kutta(hamiltonian_at, block, grid, tol, max_step) -> Tuple[List[np.ndarray], int, int]:
    """DOP853 in the interaction frame of D = diag H(t_mid): ψ(t) = exp(−iD(t − t0)) φ(t)."""
    shape = block.shape
    t0 = grid[0]
    diagonal = np.real(hamiltonian_at(0.5 * (grid[0] + grid[-1])).diagonal())[:, None]
    if isinstance(hamiltonian_at, TimeDependentHamiltonian):
        apply = hamiltonian_at.apply
    else:
        def apply(t, x):
            return hamiltonian_at(t) @ x

    def rhs(t, y):
        rotation = np.exp(-1j * diagonal * (t - t0))
        psi = rotation * y.reshape(shape)
        return (-1j * rotation.conj() * (apply(t, psi) - diagonal * psi)).ravel()

    sol = solve_ivp(
        rhs,
        (grid[0], grid[-1]),
        block.ravel().astype(complex),
        method="DOP853",
        t_eval=grid,
        rtol=tol,
        atol=tol * 1e-2,
        max_step=max_step,
    )
    if sol.status < 0:
        raise StiffnessError(sol.message, float(sol.t[-1]) if sol.t.size else grid[0])
    samples = [np.exp(-1j * diagonal * (t - t0)) * sol.y[:, i].reshape(shape) for i, t in enumerate(grid)]
    return samples, int(sol.nfev), 0


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise IonTransError("the time grid must hold at least two strictly increasing times")
    return grid


def evolve_state(
    hamiltonian_at,
    psi0: np.ndarray,
    grid: Sequence[float],
    tol: float = 1e-8,
    method: str = "auto",
    max_step: Optional[float] = None,
    observables: Optional[Mapping[str, sp.spmatrix]] = None,
) -> Trajectory:
    """Solve i dψ/dt = H(t) ψ and sample ψ at the grid times.

    Parameters
    ----------
    hamiltonian_at : TimeDependentHamiltonian or callable
        H(t) as a (sparse) matrix
    psi0 : np.ndarray
        A normalised state, or a (d, k) block of normalised states propagated together
    grid : sequence of float
        Increasing sample times; grid[0] is the initial time
    tol : float
        Local error tolerance per step
    method : str
        "auto", "static", "magnus" or "rk"
    max_step : float, optional
        Largest step; defaults to a hundredth of the grid span
    observables : mapping, optional
        Operators whose expectation values are recorded at the samples (single state only)

    Returns
    -------
    Trajectory

    Raises
    ------
    StiffnessError
        When the step size underflows
    """
    if tol <= 0:
        raise IonTransError(f"tolerance must be positive (got {tol})")
    grid = _check_grid(grid)
    psi0 = np.asarray(psi0, dtype=complex)
    block = psi0.reshape(psi0.shape[0], -1)
    norms0 = np.linalg.norm(block, axis=0)
    if np.any(np.abs(norms0 - 1.0) > NORM_TOLERANCE):
        raise NormalizationError(f"initial state norms {norms0} differ from 1")
    dimension = hamiltonian_at.dimension if isinstance(hamiltonian_at, TimeDependentHamiltonian) else None
    if dimension is None:
        dimension = hamiltonian_at(grid[0]).shape[0]
    if dimension != block.shape[0]:
        raise DimensionMismatchError(f"state of dimension {block.shape[0]} for a Hamiltonian of dimension {dimension}")

    if method == "auto":
        static = isinstance(hamiltonian_at, TimeDependentHamiltonian) and hamiltonian_at.is_static
        method = "static" if static else "magnus"
    if max_step is None:
        max_step = (grid[-1] - grid[0]) / INITIAL_STEPS

    n_steps = n_rejected = 0
    if method == "static":
        samples = _static(hamiltonian_at(grid[0]), block, grid)
    elif method == "magnus":
        samples, n_steps, n_rejected = _magnus(hamiltonian_at, block, grid, tol, max_step)
    elif method == "rk":
        samples, n_steps, n_rejected = _runge_kutta(hamiltonian_at, block, grid, tol, max_step)
    else:
        raise IonTransError(f"unknown propagation method '{method}'")

    states = np.array(samples)
    drift = float(np.max(np.abs(np.linalg.norm(states, axis=1) - norms0[None, :])))
    if drift > NORM_TOLERANCE:
        logger.warning("norm drift %.3e exceeds %.0e (method %s, tol %.1e)", drift, NORM_TOLERANCE, method, tol)
    if psi0.ndim == 1:
        states = states[:, :, 0]

    recorded = {}
    if observables and psi0.ndim == 1:
        for name, op in observables.items():
            recorded[name] = np.array([np.vdot(psi, op @ psi) for psi in states])

    logger.debug("%s propagation: %d steps, %d rejected, drift %.2e", method, n_steps, n_rejected, drift)
    return Trajectory(grid, states, recorded, {}, method, tol, n_steps, n_rejected, drift)


###############################################################################
# Lindblad propagation
###############################################################################
def commutator_superoperator(h) -> sp.csr_matrix:
    """−i[H, ·] in row-major vectorisation."""
    h = sp.csr_matrix(h)
    eye = sp.identity(h.shape[0], dtype=complex, format="csr")
    return sp.csr_matrix(-1j * (sp.kron(h, eye) - sp.kron(eye, h.T)))


def dissipator_superoperator(jump, rate: float) -> sp.csr_matrix:
    """rate · (L ρ L† − {L†L, ρ}/2) in row-major vectorisation."""
    jump = sp.csr_matrix(jump)
    eye = sp.identity(jump.shape[0], dtype=complex, format="csr")
    loss = (jump.getH() @ jump).tocsr()
    return sp.csr_matrix(rate * (sp.kron(jump, jump.conj()) - 0.5 * sp.kron(loss, eye) - 0.5 * sp.kron(eye, loss.T)))


def liouvillian(h, jumps: Sequence[Tuple[sp.spmatrix, float]]) -> sp.csr_matrix:
    generator = commutator_superoperator(h)
    for jump, rate in jumps:
        if rate < 0:
            raise NegativeRateError(f"jump rates must be non-negative (got {rate})")
        if rate > 0:
            generator = generator + dissipator_superoperator(jump, rate)
    return generator.tocsr()


def _check_density(rho: np.ndarray) -> None:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"a density matrix must be square (got shape {rho.shape})")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOLERANCE:
        raise NormalizationError("the initial density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > NORM_TOLERANCE:
        raise NormalizationError(f"the initial density matrix has trace {np.trace(rho).real}")


def evolve_density(
    hamiltonian_at,
    jumps: Sequence[Tuple[sp.spmatrix, float]],
    rho0: np.ndarray,
    grid: Sequence[float],
    tol: float = 1e-8,
    accumulate: Optional[Mapping[str, sp.spmatrix]] = None,
    observables: Optional[Mapping[str, sp.spmatrix]] = None,
    accumulator_offsets: Optional[Mapping[str, float]] = None,
    max_step: float = np.inf,
) -> Trajectory:
    """Integrate dρ/dt = −i[H(t), ρ] + Σ_k r_k D[L_k]ρ.

    Parameters
    ----------
    hamiltonian_at : TimeDependentHamiltonian or callable
        H(t); a TimeDependentHamiltonian gets its Liouvillian prebuilt term by term
    jumps : sequence of (operator, rate)
        Jump operators L_k with their non-negative rates r_k
    rho0 : np.ndarray
        The initial density matrix
    grid : sequence of float
        Increasing sample times
    tol : float
        Relative tolerance of DOP853 (absolute tolerance is tol/1000)
    accumulate : mapping, optional
        Operators A whose integrals ∫ Tr(A ρ) dt are integrated alongside ρ
    observables : mapping, optional
        Operators whose expectation values are recorded at the samples
    accumulator_offsets : mapping, optional
        Initial values of the integrals, to continue a previous run

    Returns
    -------
    Trajectory

    Raises
    ------
    NegativeRateError
        If a rate is negative
    StiffnessError
        If the integrator gives up
    """
    if tol <= 0:
        raise IonTransError(f"tolerance must be positive (got {tol})")
    grid = _check_grid(grid)
    rho0 = np.asarray(rho0, dtype=complex)
    _check_density(rho0)
    for _, rate in jumps:
        if rate < 0:
            raise NegativeRateError(f"jump rates must be non-negative (got {rate})")
    d = rho0.shape[0]
    accumulate = dict(accumulate or {})
    offsets = dict(accumulator_offsets or {})
    names = list(accumulate)

    if isinstance(hamiltonian_at, TimeDependentHamiltonian):
        if hamiltonian_at.dimension != d:
            raise DimensionMismatchError(f"density of dimension {d} for a Hamiltonian of {hamiltonian_at.dimension}")
        generator = liouvillian(hamiltonian_at.static, jumps)
        driven = [(coefficient, commutator_superoperator(op)) for coefficient, op in hamiltonian_at.terms]

        def apply_generator(t, x):
            out = generator @ x
            for coefficient, term in driven:
                value = coefficient(t)
                if value != 0.0:
                    out += value * (term @ x)
            return out

    else:
        dissipator = liouvillian(sp.csr_matrix((d, d), dtype=complex), jumps)

        def apply_generator(t, x):
            return commutator_superoperator(hamiltonian_at(t)) @ x + dissipator @ x

    # Tr(A ρ) = vec(Aᵀ) · vec(ρ)
    readout = None
    if names:
        readout = sp.vstack([sp.csr_matrix(sp.csr_matrix(accumulate[n]).T.reshape(1, d * d)) for n in names]).tocsr()

    def rhs(t, y):
        x = y[: d * d]
        dx = apply_generator(t, x)
        if readout is None:
            return dx
        return np.concatenate([dx, (readout @ x).real.astype(complex)])

    y0 = np.concatenate([rho0.ravel(), np.array([offsets.get(n, 0.0) for n in names], dtype=complex)])
    sol = solve_ivp(
        rhs, (grid[0], grid[-1]), y0, method="DOP853", t_eval=grid, rtol=tol, atol=tol * 1e-3, max_step=max_step
    )
    if sol.status < 0:
        raise StiffnessError(sol.message, float(sol.t[-1]) if sol.t.size else grid[0])

    states = np.array([sol.y[: d * d, i].reshape(d, d) for i in range(len(grid))])
    accumulators = {n: sol.y[d * d + j, :].real.copy() for j, n in enumerate(names)}

    trace0 = np.trace(rho0).real
    drift = float(np.max(np.abs(np.trace(states, axis1=1, axis2=2).real - trace0)))
    min_eigenvalue = float(min(la.eigvalsh(0.5 * (rho + rho.conj().T))[0] for rho in states))
    if drift > NORM_TOLERANCE:
        logger.warning("trace drift %.3e exceeds %.0e", drift, NORM_TOLERANCE)
    if min_eigenvalue < -NORM_TOLERANCE:
        logger.warning("density matrix eigenvalue %.3e below %.0e", min_eigenvalue, -NORM_TOLERANCE)

    recorded = {}
    for name, op in (observables or {}).items():
        op = sp.csr_matrix(op)
        recorded[name] = np.array([op.multiply(rho.T).sum() for rho in states])

    logger.debug("Lindblad: %d evaluations, drift %.2e, min eigenvalue %.2e", sol.nfev, drift, min_eigenvalue)
    return Trajectory(grid, states, recorded, accumulators, "DOP853", tol, int(sol.nfev), 0, drift, min_eigenvalue)
