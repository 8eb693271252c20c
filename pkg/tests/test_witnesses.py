import numpy as np
import pytest

from kdqflux.linalg import kron
from kdqflux.model import maximally_entangled_state, thermal_state, ThermalSpec
from kdqflux.tomography import (AffineBlochMap, affine_to_superoperator,
                                apply_superoperator, choi,
                                extract_phase_covariant)
from kdqflux.witnesses import (CpMargins, EnergyBasis, KdqDistribution,
                               avg_energy_change, cp_conditions,
                               kdq_closed_form, kdq_general, lfs_series,
                               nonpositivity, qmi, rhp_increment, rhp_measure)

BASIS = EnergyBasis(omega_s=1.0)


def population_map(a: float, b: float, coherence: float = 0.3) -> AffineBlochMap:
    """Affine map whose phase covariant entries are exactly (a, b, coherence, 0)."""
    m = np.diag([coherence, coherence, a - b])
    return AffineBlochMap(m=m, c=np.array([0.0, 0.0, a + b - 1.0]))


def entries_for(a, b, c=0.3):
    return extract_phase_covariant(affine_to_superoperator(population_map(a, b, c)))


# -------------------------------------------------------------- energy basis

def test_energy_basis_conventions():
    pi0, pi1 = BASIS.projectors
    assert np.array_equal(pi0 + pi1, np.eye(2, dtype=complex))
    assert np.allclose(pi0 @ pi1, 0.0, atol=1e-15)
    # |0> carries +omega/2 under H = (omega/2) sigma_z
    assert BASIS.energies == (0.5, -0.5)
    u = BASIS.energy_changes()
    assert u[0, 0] == 0.0 and u[1, 1] == 0.0
    assert u[0, 1] == -1.0 and u[1, 0] == 1.0


# ----------------------------------------------------------------- KDQ maps

def test_kdq_general_identity_channel_diagonal_state():
    rho = np.diag([0.3, 0.7]).astype(complex)
    dist = kdq_general(np.eye(4, dtype=complex), rho, BASIS)
    assert np.allclose(dist.q, [[0.3, 0.0], [0.0, 0.7]], atol=1e-14)


def test_kdq_general_matches_closed_form_on_phase_covariant_maps():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = rng.uniform(-0.5, 1.5, size=2)
        p0 = rng.uniform(0.0, 1.0)
        rho = np.diag([p0, 1 - p0]).astype(complex)
        sop = affine_to_superoperator(population_map(a, b))
        general = kdq_general(sop, rho, BASIS)
        closed = kdq_closed_form(a, b, p0, 1 - p0, basis=BASIS)
        assert np.max(np.abs(general.q - closed.q)) <= 1e-12


def test_kdq_general_insensitive_to_coherence_entry():
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]], dtype=complex)
    sop = affine_to_superoperator(population_map(1.05, -0.02, coherence=0.5))
    perturbed = sop.copy()
    perturbed[1, 1] += 0.17        # c entry
    perturbed[2, 2] += 0.17
    q0 = kdq_general(sop, rho, BASIS).q
    q1 = kdq_general(perturbed, rho, BASIS).q
    assert np.max(np.abs(q0 - q1)) <= 1e-14


def test_kdq_closed_form_examples():
    dist = kdq_closed_form(1.0, 0.0, 0.4, 0.6)
    assert np.allclose(dist.q, [[0.4, 0.0], [0.0, 0.6]], atol=1e-15)

    dist = kdq_closed_form(1.1, 0.0, 0.5, 0.5)
    assert np.allclose(dist.q, [[0.55, -0.05], [0.0, 0.5]], atol=1e-15)

    p_th = 1.0 / (1.0 + np.e)
    dist = kdq_closed_form(p_th, p_th, 0.5, 0.5)
    assert np.all(dist.q.real >= 0) and np.all(dist.q.real <= 1)
    assert np.max(np.abs(dist.q.imag)) == 0.0


def test_kdq_closed_form_validates_populations():
    with pytest.raises(ValueError):
        kdq_closed_form(0.5, 0.5, 0.7, 0.7)
    with pytest.raises(ValueError):
        kdq_closed_form(0.5, 0.5, 1.2, -0.2)


def test_kdq_marginals_match_populations():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a, b = rng.uniform(-0.5, 1.5, size=2)
        p0 = rng.uniform(0, 1)
        dist = kdq_closed_form(a, b, p0, 1 - p0)
        assert abs(dist.total() - 1.0) <= 1e-12
        assert np.allclose(dist.marginal_in(), [p0, 1 - p0], atol=1e-12)


# ------------------------------------------------------------ non-positivity

def test_nonpositivity_zero_for_probabilities():
    assert nonpositivity(kdq_closed_form(0.8, 0.2, 0.5, 0.5)) <= 1e-15


def test_nonpositivity_example_value():
    dist = KdqDistribution(q=np.array([[0.55, -0.05], [0.0, 0.5]], dtype=complex))
    assert nonpositivity(dist) == pytest.approx(0.1, abs=1e-14)


def test_nonpositivity_biconditional_randomized():
    rng = np.random.default_rng(7)
    for _ in range(300):
        a, b = rng.uniform(-0.5, 1.5, size=2)
        if min(abs(a), abs(a - 1), abs(b), abs(b - 1)) < 1e-12:
            continue
        for p0 in (0.1, 0.5, 0.9):
            n_q = nonpositivity(kdq_closed_form(a, b, p0, 1 - p0))
            expected = not (0 <= a <= 1 and 0 <= b <= 1)
            assert (n_q > 1e-14) == expected, (a, b, p0, n_q)


# -------------------------------------------------------------- CP conditions

def test_cp_conditions_examples():
    ok, margins = cp_conditions(entries_for(0.9, 0.1, c=0.5))
    assert ok and isinstance(margins, CpMargins)
    assert margins.c_margin == pytest.approx(0.9 * 0.9 - 0.25, abs=1e-12)

    ok, margins = cp_conditions(entries_for(1.1, 0.0))
    assert not ok and margins.a_margin < 0

    ok, margins = cp_conditions(entries_for(0.5, 0.5, c=0.6))
    assert not ok
    assert margins.c_margin == pytest.approx(0.25 - 0.36, abs=1e-12)


def test_cp_conditions_agree_with_choi_positivity():
    rng = np.random.default_rng(11)
    for _ in range(40):
        a, b = rng.uniform(-0.2, 1.2, size=2)
        c = rng.uniform(-0.8, 0.8)
        sop = affine_to_superoperator(population_map(a, b, c))
        ok, _ = cp_conditions(extract_phase_covariant(sop))
        min_eig = np.linalg.eigvalsh(choi(sop)).min()
        assert ok == (min_eig >= -1e-12), (a, b, c, min_eig)


# ---------------------------------------------------------------- RHP pieces

def test_rhp_increment_identity_channel():
    assert rhp_increment(choi(np.eye(4, dtype=complex))) == pytest.approx(0.0, abs=1e-14)


def test_rhp_increment_example():
    j = np.diag([1.1, -0.1, 0.0, 1.0]).astype(complex)
    assert rhp_increment(j) == pytest.approx(0.1, abs=1e-14)


def test_rhp_increment_invariant_under_ancilla_swap():
    rng = np.random.default_rng(13)
    swap = np.zeros((4, 4))
    swap[0, 0] = swap[3, 3] = 1
    swap[1, 2] = swap[2, 1] = 1
    for _ in range(10):
        a, b = rng.uniform(-0.3, 1.3, size=2)
        j = choi(affine_to_superoperator(population_map(a, b, rng.uniform(-0.5, 0.5))))
        swapped = swap @ j @ swap
        assert rhp_increment(j) == pytest.approx(rhp_increment(swapped), abs=1e-12)


def test_rhp_increment_equals_trace_norm_of_choi_state():
    # (Lambda (x) I)[Bell] is J/2 up to reordering, so g = ||J/2||_1 - 1
    rng = np.random.default_rng(17)
    a, b = 1.15, -0.07
    sop = affine_to_superoperator(population_map(a, b, 0.2))
    bell = maximally_entangled_state()
    # build (I (x) Lambda)[Bell] column by column from the matrix units
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[i, j] = 1.0
            block = apply_superoperator(sop, unit)
            out += 0.5 * np.kron(unit, block)
    w = np.linalg.eigvalsh(out)
    assert rhp_increment(choi(sop)) == pytest.approx(np.abs(w).sum() - 1.0, abs=1e-12)


def test_rhp_measure():
    assert rhp_measure([0.0, 0.0]) == 0.0
    assert rhp_measure([0.1]) == pytest.approx(0.1)
    assert rhp_measure([-1e-13, 0.2, 0.05]) == pytest.approx(0.25)


# ------------------------------------------------------------- energy change

def test_avg_energy_change_identity():
    assert avg_energy_change(entries_for(1.0, 0.0), 0.5, 0.5, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_avg_energy_change_full_swap_thermal():
    p_th = 1.0 / (1.0 + np.e)
    value = avg_energy_change(entries_for(p_th, p_th, c=0.0), 0.5, 0.5, 1.0)
    assert value == pytest.approx(-0.5 * np.tanh(0.5), abs=1e-12)
    assert value == pytest.approx(-0.2311, abs=1e-4)


def test_avg_energy_change_matches_trace_expression():
    rng = np.random.default_rng(19)
    for _ in range(15):
        a, b = rng.uniform(-0.3, 1.3, size=2)
        bm = population_map(a, b, rng.uniform(-0.5, 0.5))
        sop = affine_to_superoperator(bm)
        p0 = rng.uniform(0, 1)
        rho = np.diag([p0, 1 - p0]).astype(complex)
        omega_s = rng.uniform(0.3, 1.5)
        h_s = (omega_s / 2) * np.diag([1.0, -1.0])
        delta = apply_superoperator(sop, rho) - rho
        expected = np.trace(h_s @ delta).real
        got = avg_energy_change(extract_phase_covariant(sop), p0, 1 - p0, omega_s)
        assert got == pytest.approx(expected, abs=1e-12)


def test_avg_energy_change_equals_q_weighted_sum():
    rng = np.random.default_rng(23)
    for _ in range(10):
        a, b = rng.uniform(-0.3, 1.3, size=2)
        p0 = rng.uniform(0, 1)
        basis = EnergyBasis(omega_s=0.8)
        dist = kdq_closed_form(a, b, p0, 1 - p0, basis=basis)
        weighted = (dist.q * dist.u).sum().real
        got = avg_energy_change(entries_for(a, b), p0, 1 - p0, 0.8)
        assert got == pytest.approx(weighted, abs=1e-12)


# ----------------------------------------------------------------- QMI / LFS

def test_qmi_product_state():
    rho = kron(np.diag([0.2, 0.8]), np.diag([0.6, 0.4])).astype(complex)
    assert qmi(rho) == pytest.approx(0.0, abs=1e-12)


def test_qmi_bell_state():
    assert qmi(maximally_entangled_state()) == pytest.approx(2.0, abs=1e-12)


def test_qmi_full_swap_channel_is_product():
    rho_th = thermal_state(ThermalSpec(), 1.0)
    bm = AffineBlochMap(m=np.zeros((3, 3)), c=np.array([0, 0, -np.tanh(0.5)]))
    j = choi(affine_to_superoperator(bm))
    assert np.allclose(j / 2, kron(np.eye(2) / 2, rho_th), atol=1e-12)
    assert qmi(j / 2) == pytest.approx(0.0, abs=1e-12)


def test_lfs_series_identity_family_is_flat():
    j_id = choi(np.eye(4, dtype=complex))
    delta, total = lfs_series([j_id] * 6)
    assert delta.shape == (5,)
    assert np.max(np.abs(delta)) <= 1e-12
    assert total == 0.0


def test_lfs_series_starts_at_two_bits():
    j_id = choi(np.eye(4, dtype=complex))
    assert qmi(j_id / 2) == pytest.approx(2.0, abs=1e-12)


def test_lfs_series_rejects_unphysical_states():
    j_bad = np.diag([1.3, -0.3, 0.0, 1.0]).astype(complex)
    with pytest.raises(ValueError):
        lfs_series([choi(np.eye(4, dtype=complex)), j_bad])


def test_lfs_series_counts_positive_increments_only():
    p_th = 1.0 / (1.0 + np.e)
    thermalizing = choi(affine_to_superoperator(
        AffineBlochMap(m=np.zeros((3, 3)), c=np.array([0, 0, -np.tanh(0.5)]))))
    partial = choi(affine_to_superoperator(
        AffineBlochMap(m=np.diag([0.7, 0.7, 0.7]), c=np.array([0, 0, -0.2]))))
    identity = choi(np.eye(4, dtype=complex))
    delta, total = lfs_series([identity, partial, thermalizing, partial])
    assert delta[0] < 0 and delta[1] < 0 and delta[2] > 0
    assert total == pytest.approx(delta[2], abs=1e-12)
