"""Spin-S matrices, the quantum-link truncation, and spin-to-qubit encodings.

The gauge field on a link is truncated to a spin S system with d_S = 2S + 1
flux states |m>, m = S .. -S. Two encodings are provided:

* logarithmic: state |m> -> basis index S - m on ceil(log2 d_S) qubits
  (most significant qubit first); operators are embedded with an identity
  block on the unused states and Pauli-decomposed.
* linear: one-hot on d_S qubits, |m> -> the qubit at position m + S counted
  from the left; operators are built from sigma+- pairs.

Encoded link operators are kept in units of the charge e: E = Sz + theta,
U = S+ / sqrt(S(S+1)), with the spin matrices built by the highest-weight
ladder construction (S+|m> = sqrt(S(S+1) - m(m+1)) |m+1>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from lgt.pauli import (
    DROP_TOL,
    PauliOperator,
    PauliString,
    classify,
    decompose_matrix,
)


def check_spin(spin: float) -> int:
    """Validate a positive half-integer spin; returns d_S."""
    two_s = round(2 * spin)
    if abs(2 * spin - two_s) > 1e-12 or two_s < 1:
        raise ValueError(f"spin must be a positive half-integer, got {spin}")
    return two_s + 1


def is_perfectly_representable(spin: float) -> bool:
    d_s = check_spin(spin)
    return d_s & (d_s - 1) == 0


@dataclass(frozen=True)
class SpinMatrices:
    spin: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    splus: np.ndarray


def spin_matrices(spin: float) -> SpinMatrices:
    """Spin operators in the |m = S>, ..., |m = -S> basis."""
    d_s = check_spin(spin)
    m = spin - np.arange(d_s)          # m value of basis index l
    splus = np.zeros((d_s, d_s), dtype=complex)
    for l in range(1, d_s):
        # <l-1| S+ |l> raises m by one unit
        amp = math.sqrt(spin * (spin + 1) - m[l] * (m[l] + 1))
        splus[l - 1, l] = amp
    sx = (splus + splus.conj().T) / 2
    sy = (splus - splus.conj().T) / 2j
    sz = np.diag(m).astype(complex)
    return SpinMatrices(spin, sx, sy, sz, splus)


# -- logarithmic encoding ----------------------------------------------


def log_qubits(spin: float) -> int:
    d_s = check_spin(spin)
    return max(1, math.ceil(math.log2(d_s)))


def embed_matrix(spin: float, m: np.ndarray) -> np.ndarray:
    """Pad a d_S x d_S matrix to 2^n with an identity block on unused states."""
    d_s = check_spin(spin)
    if m.shape != (d_s, d_s):
        raise ValueError(f"expected a {d_s}x{d_s} matrix")
    dim = 1 << log_qubits(spin)
    out = np.eye(dim, dtype=complex)
    out[:d_s, :d_s] = m
    return out


def encode_log(spin: float, m: np.ndarray, tol: float = DROP_TOL) -> PauliOperator:
    """Identity-padded embedding of a spin-space matrix, Pauli decomposed."""
    return decompose_matrix(embed_matrix(spin, m), tol=tol)


# -- linear (one-hot) encoding ------------------------------------------


def _sigma_pm(n: int, qubit: int, kind: str) -> PauliOperator:
    """sigma+ = |1><0| or sigma- = |0><1| on one qubit of an n-qubit register."""
    sign = -1j if kind == "+" else 1j
    return PauliOperator.from_terms(n, [
        PauliString(n, 1 << qubit, 0, 0.5),
        PauliString(n, 1 << qubit, 1 << qubit, sign * 0.5),
    ])


def _one_hot_qubit(spin: float, m: float) -> int:
    # |m = -S> occupies the leftmost qubit (index 0)
    return int(round(m + spin))


def encode_lin(spin: float, which: str, tol: float = DROP_TOL) -> PauliOperator:
    """One-hot encoded spin operator; ``which`` is one of x, y, z, plus."""
    d_s = check_spin(spin)
    n = d_s
    if which == "z":
        terms = []
        for l in range(d_s):
            m = spin - l
            if m == 0:
                continue
            q = _one_hot_qubit(spin, m)
            # m * occupation number (I - Z)/2 of the marker qubit
            terms.append(PauliString(n, 0, 0, 0.5 * m))
            terms.append(PauliString(n, 0, 1 << q, -0.5 * m))
        return PauliOperator.from_terms(n, terms, tol=tol)
    if which in ("plus", "x", "y"):
        splus = PauliOperator.zero(n)
        two_s = d_s - 1
        for step in range(two_s):
            m = -spin + step
            amp = math.sqrt(spin * (spin + 1) - m * (m + 1))
            q_from = _one_hot_qubit(spin, m)
            moved = _sigma_pm(n, q_from + 1, "+") * _sigma_pm(n, q_from, "-")
            splus = splus + amp * moved
        if which == "plus":
            return splus
        sminus = splus.dagger()
        if which == "x":
            return 0.5 * (splus + sminus)
        return (-0.5j) * (splus - sminus)
    raise ValueError(f"unknown spin operator {which!r}")


def one_hot_isometry(spin: float) -> np.ndarray:
    """Columns are the one-hot basis states in |m = S>, ..., |m = -S> order."""
    d_s = check_spin(spin)
    dim = 1 << d_s
    v = np.zeros((dim, d_s))
    for l in range(d_s):
        q = _one_hot_qubit(spin, spin - l)
        v[1 << (d_s - 1 - q), l] = 1.0  # qubit 0 is the index MSB
    return v


def log_isometry(spin: float) -> np.ndarray:
    """Columns are the embedded flux states for the logarithmic encoding."""
    d_s = check_spin(spin)
    dim = 1 << log_qubits(spin)
    v = np.zeros((dim, d_s))
    for l in range(d_s):
        v[l, l] = 1.0
    return v


def encoding_isometry(spin: float, encoding: str) -> np.ndarray:
    if encoding == "log":
        return log_isometry(spin)
    if encoding == "linear":
        return one_hot_isometry(spin)
    raise ValueError(f"unsupported encoding {encoding!r}")


def flux_state_index(spin: float, encoding: str, m: float) -> int:
    """Computational-basis index of the flux state |m> on a single link."""
    d_s = check_spin(spin)
    l = round(spin - m)
    if not 0 <= l < d_s or abs((spin - m) - l) > 1e-9:
        raise ValueError(f"m = {m} outside the spin-{spin} flux window")
    if encoding == "log":
        return l
    if encoding == "linear":
        q = _one_hot_qubit(spin, m)
        return 1 << (d_s - 1 - q)
    raise ValueError(f"unsupported encoding {encoding!r}")


# -- encoded links -------------------------------------------------------


@dataclass(frozen=True)
class EncodedLink:
    """Qubit-encoded truncated gauge operators for one link (units of e)."""

    spin: float
    encoding: str
    theta: float
    n_qubits: int
    e_op: PauliOperator      # Sz + theta : physical flux in units of e
    u: PauliOperator         # S+ / sqrt(S(S+1))
    u_dag: PauliOperator
    e_sq: PauliOperator      # (Sz + theta)^2


@lru_cache(maxsize=None)
def qlm_link(spin: float, encoding: str, theta: float = 0.0) -> EncodedLink:
    d_s = check_spin(spin)
    norm = 1.0 / math.sqrt(spin * (spin + 1))
    mats = spin_matrices(spin)
    if encoding == "log":
        n = log_qubits(spin)
        sz_enc = encode_log(spin, mats.sz)
        # U is the sum of the separately padded Sx and Sy embeddings, so the
        # unused-state block carries (1 + i) and yields the mixed (a + ia) terms
        u = norm * (encode_log(spin, mats.sx) + 1j * encode_log(spin, mats.sy))
        # squared-and-shifted matrix encoded directly: the identity padding
        # stays 1 instead of picking up spurious (1 + theta)^2 contributions
        shifted = (mats.sz + theta * np.eye(d_s)) @ (mats.sz + theta * np.eye(d_s))
        e_sq = encode_log(spin, shifted)
        e_op = sz_enc + PauliOperator.identity(n, theta) if theta else sz_enc
    elif encoding == "linear":
        n = d_s
        sz_enc = encode_lin(spin, "z")
        u = norm * encode_lin(spin, "plus")
        e_op = sz_enc + PauliOperator.identity(n, theta) if theta else sz_enc
        # algebra square reproduces the exact linear-encoding term counts
        e_sq = e_op * e_op
    else:
        raise ValueError(f"unsupported encoding {encoding!r}")
    return EncodedLink(spin, encoding, theta, n, e_op, u, u.dagger(), e_sq)


# -- string counts --------------------------------------------------------


@dataclass(frozen=True)
class SpinPauliCounts:
    sx: int
    sy: int
    sz: int
    splus: int


def spin_pauli_counts(spin: float, encoding: str) -> SpinPauliCounts:
    """Exact Pauli-string counts of the encoded spin operators."""
    d_s = check_spin(spin)
    if encoding == "linear":
        n_xy = 2 * d_s - 2
        n_z = d_s if d_s % 2 == 0 else d_s - 1
        return SpinPauliCounts(n_xy, n_xy, n_z, 4 * (d_s - 1))
    if encoding != "log":
        raise ValueError(f"unsupported encoding {encoding!r}")
    if d_s > 1 << 10:
        raise ValueError("logarithmic count enumeration limited to d_S <= 1024")
    mats = spin_matrices(spin)
    sx_enc = encode_log(spin, mats.sx)
    sy_enc = encode_log(spin, mats.sy)
    return SpinPauliCounts(
        sx_enc.n_terms,
        sy_enc.n_terms,
        encode_log(spin, mats.sz).n_terms,
        (sx_enc + 1j * sy_enc).n_terms,
    )


def u_classify(spin: float, encoding: str):
    """(n_real, n_imag, n_mixed) of the encoded link operator U."""
    return classify(qlm_link(spin, encoding).u)
