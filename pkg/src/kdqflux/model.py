"""Physical ingredients of the memory-mediated qubit collision model.

A system qubit S talks to a memory qubit M, which in turn collides with a
stream of fresh environment qubits A. Conventions used throughout:

* subsystem ordering is S (x) M (x) A for all 8-dimensional operators;
* natural units, hbar = k_B = 1;
* local Hamiltonians are (omega/2) sigma_z, so |0> carries energy +omega/2.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import exp_hermitian_generator, kron

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

ISOTROPIC = "isotropic"
ANISOTROPIC = "anisotropic"

# Inverse temperatures above this produce degenerate Gibbs weights in double
# precision; reject instead of silently returning a rank-deficient state.
BETA_MAX = 1e3


@dataclass(frozen=True)
class SpinParams:
    """Angular frequencies of the three qubits (natural units)."""

    omega_s: float = 1.0
    omega_m: float = 1.0
    omega_a: float = 1.0

    @property
    def detuning(self) -> float:
        """System-memory detuning omega_S - omega_M."""
        return self.omega_s - self.omega_m

    def __post_init__(self):
        for name in ("omega_s", "omega_m", "omega_a"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class CouplingParams:
    """Interaction strengths, collision durations and S-M interaction kind.

    ``aniso_strength`` multiplies the anisotropic S-M Hamiltonian; ``None``
    selects ``g_sm / 2`` so the anisotropic coupling is scaled like the
    exchange terms of the isotropic interaction.
    """

    g_sm: float = 0.2
    g_ma: float = 0.2
    tau1: float = 0.2
    tau2: float = 0.2
    gamma: float = 0.0
    sm_interaction_kind: str = ISOTROPIC
    aniso_strength: float | None = None

    @property
    def tau(self) -> float:
        """Duration of one full collision step."""
        return self.tau1 + self.tau2

    def __post_init__(self):
        if self.tau1 < 0 or self.tau2 < 0:
            raise ValueError("collision durations tau1, tau2 must be >= 0")
        if not -1.0 <= self.gamma <= 1.0:
            raise ValueError(f"anisotropy gamma={self.gamma} outside [-1, 1]")
        if self.sm_interaction_kind not in (ISOTROPIC, ANISOTROPIC):
            raise ValueError(
                f"unknown sm_interaction_kind {self.sm_interaction_kind!r}")


@dataclass(frozen=True)
class ThermalSpec:
    """Inverse temperature of memory and environment qubits (k_B = 1)."""

    beta: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ValueError("beta must be finite and >= 0")
        if self.beta > BETA_MAX:
            raise ValueError(f"beta={self.beta:g} exceeds supported maximum {BETA_MAX:g}")


def local_hamiltonian(omega: float) -> np.ndarray:
    """(omega/2) sigma_z."""
    return (omega / 2.0) * SIGMA_Z


def heisenberg_interaction(g: float) -> np.ndarray:
    """(g/2)(XX + YY + ZZ) on two qubits; conserves total z-magnetization."""
    return (g / 2.0) * (kron(SIGMA_X, SIGMA_X) + kron(SIGMA_Y, SIGMA_Y)
                        + kron(SIGMA_Z, SIGMA_Z))


def anisotropic_sm_interaction(gamma: float, strength: float = 1.0) -> np.ndarray:
    """Anisotropic exchange (1-gamma)/2 XX + (1+gamma)/2 YY + ZZ, times ``strength``.

    For gamma != 0 this breaks excitation-number conservation, which couples
    the two coherence sectors of the reduced map.
    """
    if not -1.0 <= gamma <= 1.0:
        raise ValueError(f"gamma={gamma} outside [-1, 1]")
    return strength * ((1.0 - gamma) / 2.0 * kron(SIGMA_X, SIGMA_X)
                       + (1.0 + gamma) / 2.0 * kron(SIGMA_Y, SIGMA_Y)
                       + kron(SIGMA_Z, SIGMA_Z))


def _sm_hamiltonian(couplings: CouplingParams) -> np.ndarray:
    if couplings.sm_interaction_kind == ANISOTROPIC:
        strength = couplings.aniso_strength
        if strength is None:
            strength = couplings.g_sm / 2.0
        return anisotropic_sm_interaction(couplings.gamma, strength)
    return heisenberg_interaction(couplings.g_sm)


def collision_unitaries(spins: SpinParams,
                        couplings: CouplingParams) -> tuple[np.ndarray, np.ndarray]:
    """The two 8x8 propagators of a collision step, on S (x) M (x) A.

    ``u_sm`` generates the system-memory collision of duration tau1 and
    ``u_ma`` the memory-environment collision of duration tau2; both include
    the free evolution of all three qubits.
    """
    h_free = (kron(kron(local_hamiltonian(spins.omega_s), IDENTITY_2), IDENTITY_2)
              + kron(kron(IDENTITY_2, local_hamiltonian(spins.omega_m)), IDENTITY_2)
              + kron(kron(IDENTITY_2, IDENTITY_2), local_hamiltonian(spins.omega_a)))
    u_sm = exp_hermitian_generator(
        h_free + kron(_sm_hamiltonian(couplings), IDENTITY_2), couplings.tau1)
    u_ma = exp_hermitian_generator(
        h_free + kron(IDENTITY_2, heisenberg_interaction(couplings.g_ma)),
        couplings.tau2)
    return u_sm, u_ma


def thermal_state(spec: ThermalSpec, omega: float) -> np.ndarray:
    """Gibbs state exp(-beta H)/Z for H = (omega/2) sigma_z.

    Diagonal in the computational basis; for omega > 0 the excited level is
    |0> so the ground population sits on |1>.
    """
    w = np.exp(-spec.beta * np.array([omega / 2.0, -omega / 2.0]))
    w /= w.sum()
    return np.diag(w).astype(complex)


def probe_states() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four tomography probes P0, P1, P+, PR (rank-1 projectors)."""
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    p_plus = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
    p_r = 0.5 * np.array([[1, -1j], [1j, 1]], dtype=complex)
    return p0, p1, p_plus, p_r


def maximally_entangled_state() -> np.ndarray:
    """Projector onto (|00> + |11>)/sqrt(2) on two qubits."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    return np.outer(psi, psi.conj())
