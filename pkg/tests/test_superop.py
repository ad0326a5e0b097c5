"""Superoperator toolbox: conventions, conversions, norms.

The vectorization convention is row-major, so everything here is pinned
against direct matrix algebra on random inputs.
"""

import numpy as np
import pytest

from dotparity._superop import (apply_superop, average_gate_fidelity,
                                choi_from_superop, cp_defect,
                                diamond_distance, diamond_norm,
                                embed_pair_operator, embed_pair_superop_apply,
                                identity_superop, kraus_from_superop,
                                pauli_basis, ptm, sandwich, spost, spre,
                                superop_from_apply, superop_from_choi,
                                trace_hermitian_defects, unitary_superop, unvec,
                                vec)

RNG = np.random.default_rng(42)


def random_matrix(d):
    return RNG.normal(size=(d, d)) + 1j * RNG.normal(size=(d, d))


def random_density(d):
    a = random_matrix(d)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def amplitude_damping(gamma):
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return sandwich(k0) + sandwich(k1)


def depolarizing(p):
    eye2 = np.eye(2, dtype=complex)
    return (1.0 - p) * identity_superop(2) + p * np.outer(vec(eye2) / 2.0,
                                                          vec(eye2))


# ---------------------------------------------------------------------------
# vectorization algebra


def test_vec_unvec_roundtrip():
    a = random_matrix(3)
    assert np.array_equal(unvec(vec(a), 3), a)


def test_vec_is_row_major():
    a = np.arange(4.0).reshape(2, 2)
    assert np.array_equal(vec(a), [0.0, 1.0, 2.0, 3.0])


def test_spre_spost_sandwich_against_direct_algebra():
    a, b, rho = random_matrix(3), random_matrix(3), random_density(3)
    assert np.allclose(apply_superop(spre(a), rho), a @ rho)
    assert np.allclose(apply_superop(spost(b), rho), rho @ b)
    assert np.allclose(apply_superop(sandwich(a, b), rho),
                       a @ rho @ b.conj().T)
    assert np.allclose(apply_superop(sandwich(a), rho), a @ rho @ a.conj().T)


def test_superop_from_apply_materializes_the_map():
    a, b = random_matrix(3), random_matrix(3)
    s = superop_from_apply(lambda r: a @ r @ b.conj().T + 0.5 * r, 3)
    rho = random_density(3)
    assert np.allclose(apply_superop(s, rho),
                       a @ rho @ b.conj().T + 0.5 * rho)


def test_identity_superop_is_identity():
    rho = random_density(4)
    assert np.allclose(apply_superop(identity_superop(4), rho), rho)


# ---------------------------------------------------------------------------
# Choi / Kraus


def test_choi_roundtrip():
    s = np.asarray(random_matrix(9), dtype=complex)
    assert np.allclose(superop_from_choi(choi_from_superop(s)), s)


def test_choi_of_identity_is_maximally_entangled():
    j = choi_from_superop(identity_superop(2))
    phi = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)  # sum_i |ii>
    assert np.allclose(j, np.outer(phi, phi.conj()))


def test_kraus_of_unitary_channel_is_the_unitary():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    ops = kraus_from_superop(unitary_superop(u))
    assert len(ops) == 1
    # up to a global phase
    k = ops[0]
    phase = k[0, 1] / u[0, 1]
    assert np.allclose(k, phase * u)


def test_kraus_decomposition_is_trace_preserving():
    s = amplitude_damping(0.3)
    ops = kraus_from_superop(s)
    assert len(ops) == 2
    total = sum(k.conj().T @ k for k in ops)
    assert np.allclose(total, np.eye(2), atol=1e-12)
    rho = random_density(2)
    rebuilt = sum(k @ rho @ k.conj().T for k in ops)
    assert np.allclose(rebuilt, apply_superop(s, rho), atol=1e-12)


def test_transpose_map_is_detected_as_non_cp():
    s_t = superop_from_apply(lambda r: r.T, 2)
    assert cp_defect(s_t) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(ValueError):
        kraus_from_superop(s_t)


def test_cp_and_tp_defects_of_a_physical_channel():
    s = amplitude_damping(0.4)
    assert cp_defect(s) == pytest.approx(0.0, abs=1e-12)
    tp, herm = trace_hermitian_defects(s)
    assert tp < 1e-12 and herm < 1e-12


def test_tp_defect_flags_a_lossy_map():
    half = 0.5 * identity_superop(2)
    tp, _ = trace_hermitian_defects(half)
    assert tp == pytest.approx(0.5, abs=1e-12)


# ---------------------------------------------------------------------------
# PTM / fidelity


def test_pauli_basis_size_and_normalization():
    names, mats = pauli_basis(2)
    assert len(names) == 16 and names[0] == "II" and names[-1] == "ZZ"
    for m in mats:
        assert np.allclose(m @ m, np.eye(4))


def test_ptm_of_identity():
    assert np.allclose(ptm(identity_superop(2), 1), np.eye(4))


def test_ptm_of_x_rotation():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    r = ptm(unitary_superop(u), 1)
    assert np.allclose(r, np.diag([1.0, 1.0, -1.0, -1.0]), atol=1e-12)


def test_average_gate_fidelity_of_exact_unitary():
    u = np.array([[1, 0], [0, 1j]], dtype=complex)
    assert average_gate_fidelity(unitary_superop(u), u) == pytest.approx(
        1.0, abs=1e-12)


def test_average_gate_fidelity_of_depolarizing():
    # 1 - p/2 for a single qubit
    p = 0.12
    f = average_gate_fidelity(depolarizing(p), np.eye(2, dtype=complex))
    assert f == pytest.approx(1.0 - p / 2.0, abs=1e-12)


# ---------------------------------------------------------------------------
# register embeddings


def test_embed_pair_operator_in_natural_order():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    full = embed_pair_operator(np.kron(x, y), (0, 2), 3)
    assert np.allclose(full, np.kron(np.kron(x, np.eye(2)), y))


def test_embed_pair_operator_swapped_order():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    full = embed_pair_operator(np.kron(x, z), (2, 0), 3)
    # first tensor slot of the pair op lands on qubit 2
    assert np.allclose(full, np.kron(np.kron(z, np.eye(2)), x))


def test_embed_pair_superop_matches_operator_conjugation():
    cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    rho = random_density(8)
    for pair in ((0, 1), (1, 2), (2, 0)):
        via_super = embed_pair_superop_apply(unitary_superop(cnot), rho,
                                             pair, 3)
        u_full = embed_pair_operator(cnot, pair, 3)
        assert np.allclose(via_super, u_full @ rho @ u_full.conj().T,
                           atol=1e-12)


def test_embed_pair_superop_applies_nonunitary_maps():
    # damping on the pair's first slot, identity on its second, built from
    # the lifted Kraus operators
    gamma = 0.25
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    eye2 = np.eye(2, dtype=complex)
    s_pair = sandwich(np.kron(k0, eye2)) + sandwich(np.kron(k1, eye2))
    rho_a = random_density(2)
    rho_b = random_density(2)
    rho_c = random_density(2)
    rho = np.kron(np.kron(rho_a, rho_b), rho_c)
    out = embed_pair_superop_apply(s_pair, rho, (0, 2), 3)
    expect = np.kron(np.kron(apply_superop(amplitude_damping(gamma), rho_a),
                             rho_b), rho_c)
    assert np.allclose(out, expect, atol=1e-12)


# ---------------------------------------------------------------------------
# diamond norm


def test_diamond_distance_of_phase_rotation():
    theta = np.pi / 2
    u = np.diag([1.0, np.exp(1j * theta)])
    dist = diamond_distance(unitary_superop(u), identity_superop(2))
    assert dist == pytest.approx(2.0 * np.sin(theta / 2.0), abs=1e-5)


def test_diamond_norm_of_depolarizing_difference():
    p = 0.2
    dist = diamond_distance(depolarizing(p), identity_superop(2))
    assert dist == pytest.approx(1.5 * p, abs=1e-5)
