"""Truncated dot (x) photon Hamiltonian and its closed-form spectrum.

Basis ordering is electron-fastest: index ``2n + j`` holds the state
``e_j (x) Fock_n``.  The annihilator is projected onto the kept Fock states
(matrix elements sqrt(n) for n < cutoff; transitions out of the top level are
dropped), which preserves Hermiticity and leaves every excitation block below
the cutoff exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .model import ModelConfig, ValidatedConfig, validate

EIGENBASIS = "eigenbasis"
CONTACT_BASIS = "contact_basis"


@dataclass(frozen=True, eq=False)
class DotPhotonHamiltonian:
    dim: int
    matrix: np.ndarray
    basis_tag: str


def _coerce(config: Union[ModelConfig, ValidatedConfig]) -> ValidatedConfig:
    return config if isinstance(config, ValidatedConfig) else validate(config)


def build_dot_hamiltonian(config: Union[ModelConfig, ValidatedConfig],
                          basis: str = EIGENBASIS) -> DotPhotonHamiltonian:
    """Assemble H_D = h_S (x) I + I (x) omega b*b + g_ph (sigma+ (x) b + h.c.)."""
    vcfg = _coerce(config)
    if basis not in (EIGENBASIS, CONTACT_BASIS):
        raise ValueError(f"unknown basis tag {basis!r}")
    nph = vcfg.cutoff
    dim = 2 * nph
    lam0, lam1 = vcfg.dot_levels
    omega, g = vcfg.omega, vcfg.g_ph
    h = np.zeros((dim, dim), dtype=complex)
    for n in range(nph):
        h[2 * n, 2 * n] = lam0 + n * omega
        h[2 * n + 1, 2 * n + 1] = lam1 + n * omega
    # sigma+ (x) b couples e0 (x) Fock_n  ->  e1 (x) Fock_{n-1} with sqrt(n)
    for n in range(1, nph):
        h[2 * (n - 1) + 1, 2 * n] = g * np.sqrt(n)
        h[2 * n, 2 * (n - 1) + 1] = g * np.sqrt(n)
    if basis == CONTACT_BASIS:
        u = np.kron(np.eye(nph), vcfg.contact_rotation())
        h = u.conj().T @ h @ u
    return DotPhotonHamiltonian(dim=dim, matrix=h, basis_tag=basis)


def excitation_number_operator(nph: int) -> np.ndarray:
    """Diagonal of N = sigma+ sigma- (x) I + I (x) b*b in the ordered basis."""
    diag = np.empty(2 * nph)
    for n in range(nph):
        diag[2 * n] = n
        diag[2 * n + 1] = n + 1
    return np.diag(diag)


def jc_spectrum_closed_form(config: Union[ModelConfig, ValidatedConfig],
                            n_max: int) -> np.ndarray:
    """Exact Jaynes-Cummings eigenvalues for excitation blocks 0..n_max.

    Returns the sorted set {lam0} U {lam0 + n*omega + (eps - omega)/2
    +/- sqrt((eps - omega)^2/4 + g^2 n) : 1 <= n <= n_max}, where lam0 is the
    dot ground level (the closed form is conventionally quoted for lam0 = 0;
    a nonzero lam0 shifts the whole spectrum).
    """
    vcfg = _coerce(config)
    lam0 = vcfg.dot_levels[0]
    eps = vcfg.config.dot.spacing
    omega, g = vcfg.omega, vcfg.g_ph
    values = [lam0]
    detune = 0.5 * (eps - omega)
    for n in range(1, n_max + 1):
        r = np.sqrt(detune * detune + g * g * n)
        center = lam0 + n * omega + detune
        values.extend((center - r, center + r))
    return np.sort(np.asarray(values))


def dump_matrix_csv(ham: DotPhotonHamiltonian, path) -> None:
    """Write real/imag parts as CSV (debugging aid behind a CLI flag)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("row,col,re,im\n")
        m = ham.matrix
        for i in range(ham.dim):
            for j in range(ham.dim):
                fh.write(f"{i},{j},{m[i, j].real:.17g},{m[i, j].imag:.17g}\n")
