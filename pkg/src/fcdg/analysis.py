"""Bloch-wave dispersion relations and full spectra of the semidiscrete
transport operator, with eigenvalues scaled by the node spacing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dg1d import Discretization1D, FluxKind, _inv_mass_lifts
from .errors import ConfigError, ParameterError
from .mesh import Mesh1D
from .operators import ElementOperators


def _flux_coefficients(flux: FluxKind, speed_sign: float = 1.0):
    """u*_L = aLL tR(k-1) + aLR tL(k);  u*_R = aRL tR(k) + aRR tL(k+1)."""
    if flux == FluxKind.CENTERED:
        return 0.5, 0.5, 0.5, 0.5
    if flux in (FluxKind.UPWIND, FluxKind.ALTERNATING):
        if speed_sign >= 0:
            return 1.0, 0.0, 1.0, 0.0
        return 0.0, 1.0, 0.0, 1.0
    raise ConfigError(f"unsupported flux {flux}")


def bloch_matrix(
    ops: ElementOperators, flux: FluxKind, theta: float, speed: float = 1.0
) -> np.ndarray:
    """Single-element operator with e^{+-i theta} phase-shifted neighbours.

    Reference element (J = 1); multiply by speed/J for a physical mesh.
    """
    flux = FluxKind.parse(flux)
    all_, alr, arl, arr = _flux_coefficients(flux, np.sign(speed))
    inv_ll, inv_lr = _inv_mass_lifts(ops)
    lt_l = ops.lift_left
    lt_r = ops.lift_right
    a = ops.inv_mass_stiffness.astype(np.complex128)
    a += np.outer(inv_ll, all_ * np.exp(-1j * theta) * lt_r + alr * lt_l)
    a -= np.outer(inv_lr, arl * lt_r + arr * np.exp(1j * theta) * lt_l)
    return speed * a


def global_transport_matrix(
    ops: ElementOperators, mesh: Mesh1D, flux: FluxKind, speed: float = 1.0
) -> np.ndarray:
    """Dense periodic semidiscrete operator over all elements."""
    flux = FluxKind.parse(flux)
    n, n_el = ops.n, mesh.n_el
    if n * n_el > 4200:
        raise ParameterError("global operator too large for dense analysis")
    all_, alr, arl, arr = _flux_coefficients(flux, np.sign(speed))
    inv_ll, inv_lr = _inv_mass_lifts(ops)
    diag = (
        ops.inv_mass_stiffness
        + np.outer(inv_ll, alr * ops.lift_left)
        - np.outer(inv_lr, arl * ops.lift_right)
    )
    left = np.outer(inv_ll, all_ * ops.lift_right)
    right = -np.outer(inv_lr, arr * ops.lift_left)
    out = np.zeros((n * n_el, n * n_el))
    jac = mesh.jacobians
    for k in range(n_el):
        s = slice(k * n, (k + 1) * n)
        sl = slice(((k - 1) % n_el) * n, ((k - 1) % n_el + 1) * n)
        sr = slice(((k + 1) % n_el) * n, ((k + 1) % n_el + 1) * n)
        out[s, s] += speed / jac[k] * diag
        out[s, sl] += speed / jac[k] * left
        out[s, sr] += speed / jac[k] * right
    return out


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray      # scaled by node spacing / |speed|
    spectral_radius: float
    max_imag: float
    basis_id: str
    flux: str


def reference_node_gap(disc: Discretization1D) -> float:
    """Scaling length on the reference element: mean node gap 2/(n_nodes-1).

    Coincides with the uniform FC spacing and with the mean LGL gap.
    """
    return 2.0 / (len(disc.ref_nodes) - 1)


def operator_spectrum(
    disc: Discretization1D, flux: FluxKind, speed: float = 1.0
) -> SpectrumResult:
    """Dense eigenvalues of the periodic operator, scaled by node spacing."""
    flux = FluxKind.parse(flux)
    a = global_transport_matrix(disc.ops, disc.mesh, flux, speed)
    lam = np.linalg.eigvals(a)
    dx = float(np.min(disc.mesh.jacobians)) * reference_node_gap(disc)
    lam_scaled = lam * dx / abs(speed)
    return SpectrumResult(
        eigenvalues=lam_scaled,
        spectral_radius=float(np.max(np.abs(lam_scaled))),
        max_imag=float(np.max(np.abs(lam_scaled.imag))),
        basis_id=disc.ops.basis_id,
        flux=flux.value,
    )


@dataclass(frozen=True)
class DispersionResult:
    K: np.ndarray                # nondimensional wavenumber k * dx
    Omega: np.ndarray            # nondimensional frequency (complex)
    flagged: np.ndarray          # branch selection ambiguous
    basis_id: str
    flux: str


def dispersion_relation(
    disc: Discretization1D, flux: FluxKind, K_samples, speed: float = 1.0
) -> DispersionResult:
    """Physical-branch Bloch frequencies Omega(K) on the reference element.

    For each K the Bloch phase is theta = K*(n_nodes-1); the physical branch
    is the eigenvector with the largest projection onto the discrete Fourier
    mode at the element nodes.  Projections below 0.5 (or near-ties) are
    flagged rather than silently resolved.
    """
    flux = FluxKind.parse(flux)
    K_samples = np.atleast_1d(np.asarray(K_samples, dtype=np.float64))
    n_gaps = len(disc.ref_nodes) - 1
    gap = reference_node_gap(disc)
    omegas = np.empty(K_samples.shape, dtype=np.complex128)
    flagged = np.zeros(K_samples.shape, dtype=bool)
    node_pos = disc.ref_nodes + 1.0  # in [0, 2] on the reference element
    for idx, K in enumerate(K_samples):
        theta = K * n_gaps
        lam, vec = np.linalg.eig(bloch_matrix(disc.ops, flux, theta, speed))
        mode = np.exp(1j * (K / gap) * node_pos)
        mode /= np.linalg.norm(mode)
        nodal = vec if disc.to_nodal is None else disc.to_nodal @ vec
        nodal = nodal / np.linalg.norm(nodal, axis=0, keepdims=True)
        proj = np.abs(mode.conj() @ nodal)
        best = int(np.argmax(proj))
        ranked = np.sort(proj)[::-1]
        if proj[best] < 0.5 or (len(ranked) > 1 and ranked[1] > 0.95 * ranked[0]):
            flagged[idx] = True
        omegas[idx] = 1j * lam[best] * gap / speed
    return DispersionResult(
        K=K_samples,
        Omega=omegas,
        flagged=flagged,
        basis_id=disc.ops.basis_id,
        flux=flux.value,
    )


def max_physical_frequency(
    disc: Discretization1D, flux: FluxKind, n_samples: int = 200
) -> float:
    """Largest frequency reached along the physical dispersion branch.

    This is how far up the imaginary axis the accurate eigenvalues extend;
    it approaches the uniform-grid limit pi as N grows.
    """
    K = np.linspace(1e-3, np.pi, n_samples)
    res = dispersion_relation(disc, flux, K)
    good = ~res.flagged
    return float(np.max(res.Omega.real[good]))


def accurate_band(result: DispersionResult, rel_tol: float = 0.01) -> float:
    """Largest K0 with |Omega(K) - K| <= rel_tol * K for all 0 < K <= K0."""
    K = result.K
    ok = np.abs(result.Omega - K) <= rel_tol * np.maximum(K, 1e-300)
    ok &= ~result.flagged
    bad = np.nonzero(~ok & (K > 0))[0]
    if bad.size == 0:
        return float(K.max())
    first_bad = bad[0]
    return float(K[first_bad - 1]) if first_bad > 0 else 0.0
