import numpy as np

from jcleads.dot import (
    CONTACT_BASIS,
    build_dot_hamiltonian,
    excitation_number_operator,
    jc_spectrum_closed_form,
)
from jcleads.model import make_config, validate


def test_decoupled_hamiltonian_is_diagonal():
    vcfg = validate(make_config(spacing=1.3, level_base=0.2, omega=0.8, cutoff=3, g_ph=0.0))
    ham = build_dot_hamiltonian(vcfg)
    expected = np.diag([0.2, 1.5, 1.0, 2.3, 1.8, 3.1])
    np.testing.assert_allclose(ham.matrix, expected, atol=1e-15)


def test_single_excitation_block():
    # n = 1 block for eps = omega = 1, g = 0.1 is [[1, 0.1], [0.1, 1]]
    vcfg = validate(make_config(spacing=1.0, omega=1.0, cutoff=2, g_ph=0.1))
    m = build_dot_hamiltonian(vcfg).matrix
    block = np.array([[m[1, 1], m[1, 2]], [m[2, 1], m[2, 2]]])
    np.testing.assert_allclose(block, [[1.0, 0.1], [0.1, 1.0]], atol=1e-15)


def test_hermiticity(rng):
    for _ in range(10):
        vcfg = validate(make_config(
            spacing=float(rng.uniform(0.2, 3)), omega=float(rng.uniform(0.4, 5)),
            cutoff=int(rng.integers(1, 9)), g_ph=float(rng.uniform(0, 1)),
            contact_angle=float(rng.uniform(0, 3)), contact_phase=float(rng.uniform(0, 6)),
        ))
        for basis in ("eigenbasis", CONTACT_BASIS):
            m = build_dot_hamiltonian(vcfg, basis).matrix
            assert np.max(np.abs(m - m.conj().T)) < 1e-14


def test_contact_basis_is_unitary_transform():
    vcfg = validate(make_config(spacing=0.7, omega=1.1, cutoff=3, g_ph=0.25,
                                contact_angle=0.9, contact_phase=2.0))
    h_eig = build_dot_hamiltonian(vcfg).matrix
    h_con = build_dot_hamiltonian(vcfg, CONTACT_BASIS).matrix
    u = np.kron(np.eye(3), vcfg.contact_rotation())
    np.testing.assert_allclose(h_con, u.conj().T @ h_eig @ u, atol=1e-14)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(h_con)),
                               np.sort(np.linalg.eigvalsh(h_eig)), atol=1e-13)


def test_commutes_with_excitation_number(rng):
    for _ in range(5):
        vcfg = validate(make_config(
            spacing=float(rng.uniform(0.2, 3)), omega=float(rng.uniform(0.4, 5)),
            cutoff=int(rng.integers(2, 9)), g_ph=float(rng.uniform(0, 1)),
        ))
        h = build_dot_hamiltonian(vcfg).matrix
        n_op = excitation_number_operator(vcfg.cutoff)
        assert np.max(np.abs(h @ n_op - n_op @ h)) < 1e-13


def test_closed_form_uncoupled_limit():
    vcfg = validate(make_config(spacing=0.9, omega=1.4, cutoff=4, g_ph=0.0))
    vals = jc_spectrum_closed_form(vcfg, 3)
    expected = sorted([0.0] + [n * 1.4 for n in (1, 2, 3)] + [(n - 1) * 1.4 + 0.9 for n in (1, 2, 3)])
    np.testing.assert_allclose(vals, expected, atol=1e-15)


def test_closed_form_resonant_pairs():
    vcfg = validate(make_config(spacing=1.0, omega=1.0, cutoff=4, g_ph=0.1))
    vals = jc_spectrum_closed_form(vcfg, 1)
    np.testing.assert_allclose(vals, [0.0, 0.9, 1.1], atol=1e-15)


def test_closed_form_with_level_base_shift():
    base = validate(make_config(spacing=1.1, omega=0.9, cutoff=3, g_ph=0.2))
    shifted = validate(make_config(spacing=1.1, omega=0.9, cutoff=3, g_ph=0.2, level_base=0.6))
    np.testing.assert_allclose(jc_spectrum_closed_form(shifted, 2),
                               jc_spectrum_closed_form(base, 2) + 0.6, atol=1e-14)


def test_numeric_spectrum_matches_closed_form(rng):
    # every block below the cutoff is exact after truncation
    for _ in range(10):
        vcfg = validate(make_config(
            spacing=float(rng.uniform(0.2, 3)), omega=float(rng.uniform(0.4, 5)),
            cutoff=int(rng.integers(2, 10)), g_ph=float(rng.uniform(0, 1)),
        ))
        numeric = np.linalg.eigvalsh(build_dot_hamiltonian(vcfg).matrix)
        for x in jc_spectrum_closed_form(vcfg, vcfg.cutoff - 1):
            assert np.min(np.abs(numeric - x)) < 1e-12
