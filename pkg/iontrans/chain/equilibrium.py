#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
DESCRIPTION

    Equilibrium positions and axial normal modes of N ions in a harmonic trap.

    Positions are dimensionless, in units of ℓ = (e²/(4πε₀ m ω²))^(1/3), for which the potential energy reads
    V(u) = Σ u_i²/2 + Σ_{i<j} 1/|u_i − u_j| and the Hessian eigenvalues are (ω_m/ω)².
"""

import logging
from typing import Optional

import numpy as np
import scipy.constants as cons

from ..errors import GeometryError, SolverFailureError
from .model import ChainGeometry, ModeTable

###############################################################################
# global constants
###############################################################################
MAX_NEWTON_ITERATIONS = 200
MAX_BACKTRACKS = 60

logger = logging.getLogger(__name__)


###############################################################################
# Functions
###############################################################################
def length_scale(trap_frequency_hz: float, ion_mass_amu: float, charge: int = 1) -> float:
    """Characteristic length ℓ of the chain in metres.

    Parameters
    ----------
    trap_frequency_hz : float
        The axial trap frequency ω/2π in Hz
    ion_mass_amu : float
        The ion mass in atomic mass units
    charge : int
        The ion charge in units of the elementary charge

    Returns
    -------
    float
        ℓ in metres
    """
    omega = 2 * np.pi * trap_frequency_hz
    mass = ion_mass_amu * cons.atomic_mass
    q = charge * cons.elementary_charge
    return (q**2 / (4 * np.pi * cons.epsilon_0 * mass * omega**2)) ** (1.0 / 3.0)


def _pair_inverse_powers(u: np.ndarray):
    diff = u[:, None] - u[None, :]
    dist = np.abs(diff)
    np.fill_diagonal(dist, np.inf)
    return diff, dist


def _potential(u: np.ndarray) -> float:
    _, dist = _pair_inverse_powers(u)
    return 0.5 * np.sum(u**2) + 0.5 * np.sum(1.0 / dist)


def _gradient(u: np.ndarray) -> np.ndarray:
    diff, dist = _pair_inverse_powers(u)
    return u - np.sum(diff / dist**3, axis=1)


def _hessian(u: np.ndarray) -> np.ndarray:
    _, dist = _pair_inverse_powers(u)
    coupling = 2.0 / dist**3
    hess = -coupling
    np.fill_diagonal(hess, 1.0 + np.sum(coupling, axis=1))
    return hess


def _initial_guess(n_ions: int) -> np.ndarray:
    # uniform chain with the empirical minimum spacing 2.018/N^0.559
    spacing = 2.018 / n_ions**0.559
    return spacing * (np.arange(n_ions) - 0.5 * (n_ions - 1))


def equilibrium_positions(n_ions: int, tol: float = 1e-12, length: Optional[float] = None) -> ChainGeometry:
    """Solve for the equilibrium of the chain with a damped Newton iteration.

    The potential is strictly convex on the ordered domain u_1 < … < u_N, so Newton steps with backtracking that
    keep the ordering converge from the uniform ansatz.

    Parameters
    ----------
    n_ions : int
        Number of ions N
    tol : float
        Maximal admitted force residual (max-norm, dimensionless)
    length : float, optional
        ℓ in metres, stored on the geometry for unit conversion

    Returns
    -------
    ChainGeometry
        The equilibrium geometry

    Raises
    ------
    SolverFailureError
        If the residual does not drop below tol within the iteration budget
    """
    if n_ions < 1:
        raise GeometryError(f"the chain needs at least one ion (got {n_ions})")
    if tol <= 0:
        raise GeometryError(f"the residual tolerance must be positive (got {tol})")

    if n_ions == 1:
        return ChainGeometry(1, np.zeros(1), 0.0, length)

    u = _initial_guess(n_ions)
    grad = _gradient(u)
    residual = np.max(np.abs(grad))
    for iteration in range(MAX_NEWTON_ITERATIONS):
        if residual < tol:
            break

        step = -np.linalg.solve(_hessian(u), grad)
        energy = _potential(u)
        alpha = 1.0
        for _ in range(MAX_BACKTRACKS):
            candidate = u + alpha * step
            if np.all(np.diff(candidate) > 0):
                cand_grad = _gradient(candidate)
                cand_residual = np.max(np.abs(cand_grad))
                # close to the minimum the energy no longer resolves the decrease, take the full step
                if residual < 1e-8 or _potential(candidate) < energy or cand_residual < residual:
                    break
            alpha *= 0.5
        else:
            raise SolverFailureError("line search stalled while relaxing the chain", residual)

        u, grad, residual = candidate, cand_grad, cand_residual

        # Restore the mirror symmetry that rounding slowly breaks
        u = 0.5 * (u - u[::-1])
        grad = _gradient(u)
        residual = np.max(np.abs(grad))

    if residual >= tol:
        raise SolverFailureError(f"Newton iteration did not converge for N={n_ions}", residual)

    logger.debug("N=%d relaxed after %d Newton steps, residual %.2e", n_ions, iteration, residual)
    return ChainGeometry(n_ions, u, float(residual), length)


def axial_mode_spectrum(geom: ChainGeometry) -> ModeTable:
    """Axial normal modes from the eigen-decomposition of the dimensionless Hessian.

    Returns
    -------
    ModeTable
        Frequencies in units of ω (ascending) and the orthonormal mode vectors as columns

    Raises
    ------
    GeometryError
        If the Hessian is not positive definite (the geometry is not a minimum)
    """
    if geom.n_ions == 1:
        return ModeTable(np.ones(1), np.ones((1, 1)))

    eigvals, eigvecs = np.linalg.eigh(_hessian(geom.positions))
    if eigvals[0] <= 0:
        raise GeometryError(f"Hessian is not positive definite (lowest eigenvalue {eigvals[0]:.3e})")

    # Fix the sign convention: largest component of each mode positive
    for m in range(eigvecs.shape[1]):
        pivot = np.argmax(np.abs(eigvecs[:, m]))
        if eigvecs[pivot, m] < 0:
            eigvecs[:, m] *= -1

    return ModeTable(np.sqrt(eigvals), eigvecs)
