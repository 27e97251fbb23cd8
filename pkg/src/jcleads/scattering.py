"""On-shell multichannel S-matrix over open (lead, photon-number) channels.

The S-matrix is assembled from the dot-space Green function with lead
self-energies,

    S_{cc'} = delta_{cc'} - i sqrt(Gamma_c Gamma_c') <d_c| (lam - H_D - Sigma(lam))^{-1} |d_c'>,

where ``d_{left,n} = delta0 (x) Fock_n`` and ``d_{right,n} = delta1 (x) Fock_n``
are the contact vectors and Sigma sums ``g_el^2 g_surface`` over *all*
channels below the photon cutoff (closed channels contribute their real
surface Green function).  Only squared moduli of entries are
contract-bearing; overall channel phases are implementation-defined.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import leads as _leads
from .dot import EIGENBASIS, build_dot_hamiltonian
from .errors import BandEdgeSingularity, NoOpenChannels, SingularLinearSystem
from .model import BAND_WIDTH, ModelConfig, Side, ValidatedConfig, validate, with_cutoff

_UNITARITY_TOL = 1e-10
_COND_LIMIT = 1e14
_SOLVE_CHUNK = 128


@dataclass(frozen=True)
class Channel:
    """Scattering channel labeled by lead and photon number."""

    side: Side
    n: int

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.n, 0 if self.side is Side.LEFT else 1)

    def __str__(self) -> str:  # compact "3_l" style label
        return f"{self.n}_{self.side.value[0]}"


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Ordered open channels at a total energy, with an index map."""

    lam: float
    channels: tuple[Channel, ...]

    def index(self, channel: Channel) -> int:
        return self.channels.index(channel)

    def __len__(self) -> int:
        return len(self.channels)


@dataclass(frozen=True, eq=False)
class SMatrix:
    """Unitary on-shell scattering matrix over the open channels."""

    lam: float
    channel_set: ChannelSet
    entries: np.ndarray

    def cross_section(self, out: Channel, into: Channel) -> float:
        i = self.channel_set.index(out)
        j = self.channel_set.index(into)
        t = self.entries[i, j] - (1.0 if i == j else 0.0)
        return float(abs(t) ** 2)

    def unitarity_defect(self) -> float:
        s = self.entries
        return float(np.max(np.abs(s.conj().T @ s - np.eye(len(s)))))


@dataclass(frozen=True, eq=False)
class CrossSectionTable:
    """sigma[i, j] = |S_ij - delta_ij|^2 over the open channels (i out, j in)."""

    channel_set: ChannelSet
    sigma: np.ndarray

    def value(self, out: Channel, into: Channel) -> float:
        return float(self.sigma[self.channel_set.index(out), self.channel_set.index(into)])


def _coerce(config: Union[ModelConfig, ValidatedConfig]) -> ValidatedConfig:
    return config if isinstance(config, ValidatedConfig) else validate(config)


def ladder_channels(cutoff: int) -> tuple[Channel, ...]:
    """All channels below the photon cutoff in deterministic order
    (n ascending, left before right)."""
    out = []
    for n in range(cutoff):
        out.append(Channel(Side.LEFT, n))
        out.append(Channel(Side.RIGHT, n))
    return tuple(out)


def open_channels(config: Union[ModelConfig, ValidatedConfig], lam: float) -> ChannelSet:
    """Channels with ``lam - n*omega`` strictly inside the lead band."""
    vcfg = _coerce(config)
    chans = []
    for ch in ladder_channels(vcfg.cutoff):
        lo, hi = vcfg.lead(ch.side).band(ch.n, vcfg.omega)
        if lo < lam < hi:
            chans.append(ch)
    return ChannelSet(lam=lam, channels=tuple(chans))


def channel_count_bound(config: Union[ModelConfig, ValidatedConfig]) -> int:
    """Upper bound 2*ceil((lam_max - lam_min)/omega) + 2 on the number of
    simultaneously open channels."""
    vcfg = _coerce(config)
    lam_min = min(vcfg.lead(Side.LEFT).bias, vcfg.lead(Side.RIGHT).bias)
    lam_max = max(vcfg.lead(Side.LEFT).bias, vcfg.lead(Side.RIGHT).bias) + BAND_WIDTH
    return 2 * math.ceil((lam_max - lam_min) / vcfg.omega) + 2


class SpectralKernel:
    """Batched evaluator of self-energies, S-matrices and cross-sections.

    Precomputes the dot Hamiltonian, the contact vectors of every channel of
    the ladder and the channel onsite constants; evaluation over a batch of
    energies then reduces to vectorized assembly plus LAPACK solves.  In the
    electron-fastest ordering the dot-space matrix ``lam - H_D - Sigma`` is
    tridiagonal (the interaction couples adjacent photon blocks and Sigma is
    2x2 block diagonal), so large cutoffs use the tridiagonal solver; small
    ones go through stacked dense solves.
    Pure function of (config, lam); no mutable state after construction.
    """

    def __init__(self, config: Union[ModelConfig, ValidatedConfig]):
        vcfg = _coerce(config)
        self.vcfg = vcfg
        self.channels = ladder_channels(vcfg.cutoff)
        self.h_dot = build_dot_hamiltonian(vcfg, EIGENBASIS).matrix
        self.dim = 2 * vcfg.cutoff
        nchan = len(self.channels)
        self.onsite = np.empty(nchan)
        self.photon_number = np.empty(nchan, dtype=int)
        self.is_left = np.zeros(nchan, dtype=bool)
        d = np.zeros((self.dim, nchan), dtype=complex)
        for c, ch in enumerate(self.channels):
            self.onsite[c] = _leads.channel_onsite(vcfg.lead(ch.side), ch.n, vcfg.omega)
            self.photon_number[c] = ch.n
            self.is_left[c] = ch.side is Side.LEFT
            vec = vcfg.delta0 if ch.side is Side.LEFT else vcfg.delta1
            d[2 * ch.n: 2 * ch.n + 2, c] = vec
        self.d = d
        self.d_dag = d.conj().T
        # contact-vector projectors per side: Sigma_n = g^2 (g_l P_L + g_r P_R)
        self.proj_left = np.outer(vcfg.delta0, vcfg.delta0.conj())
        self.proj_right = np.outer(vcfg.delta1, vcfg.delta1.conj())
        self.h_diag = np.ascontiguousarray(np.diagonal(self.h_dot)).astype(complex)
        self.h_super = np.ascontiguousarray(np.diagonal(self.h_dot, offset=1)).astype(complex)
        self.h_sub = np.ascontiguousarray(np.diagonal(self.h_dot, offset=-1)).astype(complex)

    # -- batched core ----------------------------------------------------

    def surface_gf_batch(self, lam: np.ndarray) -> np.ndarray:
        """(K, C) retarded surface Green functions, all channels."""
        x = lam[:, None] - self.onsite[None, :]
        return _leads.retarded_surface_gf(x)

    def greens_batch(self, lam: np.ndarray, g: np.ndarray, cols=None) -> np.ndarray:
        """(K, C', C') matrices <d_c|G(lam_k)|d_c'> for the channel subset
        ``cols`` (all channels when None)."""
        if cols is None:
            cols = np.arange(len(self.channels))
        if self.dim >= 24:
            return self._greens_tridiagonal(lam, g, cols)
        return self._greens_dense(lam, g, cols)

    def _greens_dense(self, lam: np.ndarray, g: np.ndarray, cols) -> np.ndarray:
        k_total = lam.shape[0]
        g2 = self.vcfg.g_el ** 2
        rhs = self.d[:, cols]
        out = np.empty((k_total, len(cols), len(cols)), dtype=complex)
        eye = np.eye(self.dim)
        for start in range(0, k_total, _SOLVE_CHUNK):
            sl = slice(start, min(start + _SOLVE_CHUNK, k_total))
            lam_k = lam[sl]
            dg = self.d[None, :, :] * g[sl][:, None, :]
            sigma = g2 * (dg @ self.d_dag)
            a = lam_k[:, None, None] * eye[None, :, :] - self.h_dot[None, :, :] - sigma
            try:
                x = np.linalg.solve(a, np.broadcast_to(rhs, a.shape[:1] + rhs.shape).copy())
            except np.linalg.LinAlgError as exc:
                raise SingularLinearSystem(str(exc)) from exc
            out[sl] = rhs.conj().T[None, :, :] @ x
        return out

    def _greens_tridiagonal(self, lam: np.ndarray, g: np.ndarray, cols) -> np.ndarray:
        from scipy.linalg import lapack as _lapack

        k_total = lam.shape[0]
        nph = self.vcfg.cutoff
        g2 = self.vcfg.g_el ** 2
        gl = g[:, 0::2]  # (K, nph): left channels sit at even ladder slots
        gr = g[:, 1::2]
        sigma = g2 * (gl[:, :, None, None] * self.proj_left[None, None, :, :]
                      + gr[:, :, None, None] * self.proj_right[None, None, :, :])
        diag = lam[:, None] - self.h_diag[None, :] \
            - sigma[:, :, [0, 1], [0, 1]].reshape(k_total, self.dim)
        super_ = np.repeat(-self.h_super[None, :], k_total, axis=0)
        sub = np.repeat(-self.h_sub[None, :], k_total, axis=0)
        super_[:, 0::2] -= sigma[:, :, 0, 1]
        sub[:, 0::2] -= sigma[:, :, 1, 0]
        rhs = self.d[:, cols]
        x_blocks = np.empty((k_total, nph, 2, len(cols)), dtype=complex)
        for k in range(k_total):
            _, _, _, x, info = _lapack.zgtsv(sub[k], diag[k], super_[k], rhs)
            if info != 0:
                raise SingularLinearSystem(f"tridiagonal solve failed (info={info})")
            x_blocks[k] = x.reshape(nph, 2, -1)
        vecs = np.empty((len(self.channels), 2), dtype=complex)
        vecs[0::2] = self.vcfg.delta0
        vecs[1::2] = self.vcfg.delta1
        gathered = x_blocks[:, self.photon_number[cols], :, :]  # (K, C', 2, C')
        out = np.einsum("cb,kcbj->kcj", vecs[cols].conj(), gathered)
        return out

    def cross_sections_chunk(self, lam: np.ndarray):
        """Compressed cross sections over the channels open anywhere in the
        chunk: returns (sigma (K, m, m), gamma (K, m), idx (m,))."""
        lam = np.asarray(lam, dtype=float)
        x = lam[:, None] - self.onsite[None, :]
        idx = np.nonzero(np.any(np.abs(x) < 2.0, axis=0))[0]
        if self.vcfg.g_el == 0.0:
            # decoupled leads scatter trivially; skip the (possibly singular)
            # dot resolvent entirely
            zeros = np.zeros((lam.shape[0], len(idx), len(idx)))
            return zeros, np.zeros((lam.shape[0], len(idx))), idx
        g = _leads.retarded_surface_gf(x)
        gam = -2.0 * self.vcfg.g_el ** 2 * g[:, idx].imag
        m = self.greens_batch(lam, g, cols=idx)
        sq = np.sqrt(gam)
        t = -1j * (sq[:, :, None] * sq[:, None, :]) * m
        return (t.real ** 2 + t.imag ** 2), gam, idx

    def cross_sections_batch(self, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Cross sections sigma (K, C, C) and widths Gamma (K, C) over the
        full ladder; rows/columns of closed channels are exactly zero."""
        lam = np.asarray(lam, dtype=float)
        nchan = len(self.channels)
        sig_open, gam_open, idx = self.cross_sections_chunk(lam)
        sigma = np.zeros((lam.shape[0], nchan, nchan))
        sigma[np.ix_(np.arange(lam.shape[0]), idx, idx)] = sig_open
        gam = np.zeros((lam.shape[0], nchan))
        gam[:, idx] = gam_open
        return sigma, gam

    # -- single-energy API ------------------------------------------------

    def self_energy(self, lam: float) -> np.ndarray:
        g = self.surface_gf_batch(np.array([lam]))[0]
        return self.vcfg.g_el ** 2 * ((self.d * g[None, :]) @ self.d_dag)

    def smatrix(self, lam: float) -> SMatrix:
        cs = open_channels(self.vcfg, lam)
        if len(cs) == 0:
            raise NoOpenChannels(f"no open channel at lambda={lam!r}")
        if self.vcfg.g_el == 0.0:
            return SMatrix(lam=float(lam), channel_set=cs,
                           entries=np.eye(len(cs), dtype=complex))
        lam_arr = np.array([float(lam)])
        g = self.surface_gf_batch(lam_arr)
        idx = np.array([self.channels.index(ch) for ch in cs.channels])
        gam = -2.0 * self.vcfg.g_el ** 2 * g[0][idx].imag
        m = self.greens_batch(lam_arr, g, cols=idx)[0]
        sq = np.sqrt(gam)
        s = np.eye(len(idx), dtype=complex) - 1j * (sq[:, None] * sq[None, :]) * m
        smat = SMatrix(lam=float(lam), channel_set=cs, entries=s)
        if smat.unitarity_defect() > _UNITARITY_TOL:
            eye = np.eye(self.dim)
            a = lam * eye - self.h_dot - self.self_energy(lam)
            if np.linalg.cond(a) > _COND_LIMIT:
                raise SingularLinearSystem(
                    f"dot-space system at lambda={lam!r} has condition number > {_COND_LIMIT:g}"
                )
        return smat


def self_energy(config: Union[ModelConfig, ValidatedConfig], lam: float) -> np.ndarray:
    """Lead self-energy Sigma(lam) on the 2*cutoff dot (x) photon space."""
    return SpectralKernel(_coerce(config)).self_energy(lam)


def smatrix(config: Union[ModelConfig, ValidatedConfig], lam: float) -> SMatrix:
    """On-shell S-matrix at total energy ``lam`` over the open channels."""
    return SpectralKernel(_coerce(config)).smatrix(lam)


def cross_sections(s: SMatrix) -> CrossSectionTable:
    """Table sigma_{cc'} = |S_{cc'} - delta_{cc'}|^2 (channels are 1-dim)."""
    t = s.entries - np.eye(len(s.entries))
    return CrossSectionTable(channel_set=s.channel_set, sigma=(t.real ** 2 + t.imag ** 2))


def contact_config(config: Union[ModelConfig, ValidatedConfig]) -> ValidatedConfig:
    """The pure electron problem: photons decoupled, single Fock state."""
    vcfg = _coerce(config)
    return validate(dataclasses.replace(with_cutoff(vcfg.config, 1), g_ph=0.0))


def contact_smatrix(config: Union[ModelConfig, ValidatedConfig], lam_rel: float) -> SMatrix:
    """Contact-only scattering matrix s_c over the open lead channels."""
    return smatrix(contact_config(config), lam_rel)


def contact_cross_section(config: Union[ModelConfig, ValidatedConfig], lam_rel: float) -> float:
    """Left<->right contact transmission sigma_c; 0 unless both leads are open."""
    vcfg = contact_config(config)
    cs = open_channels(vcfg, lam_rel)
    if len(cs) < 2:
        return 0.0
    return cross_sections(smatrix(vcfg, lam_rel)).sigma[0, 1]


def sweep_rows(config: Union[ModelConfig, ValidatedConfig], lams: Sequence[float]):
    """Cross-section rows (lambda, n, alpha, m, kappa, sigma) over an energy
    grid, skipping energies with no open channel or an exact band edge."""
    vcfg = _coerce(config)
    kern = SpectralKernel(vcfg)
    rows = []
    for lam in lams:
        try:
            s = kern.smatrix(float(lam))
        except (NoOpenChannels, BandEdgeSingularity):
            continue
        table = cross_sections(s)
        for i, out in enumerate(s.channel_set.channels):
            for j, into in enumerate(s.channel_set.channels):
                rows.append((float(lam), out.n, out.side.value, into.n,
                             into.side.value, float(table.sigma[i, j])))
    return rows
