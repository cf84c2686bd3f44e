"""Exact algebra over weighted sums of n-qubit Pauli strings.

A Pauli string is stored in symplectic form: two integer bitmasks ``x`` and
``z`` where bit ``i`` refers to qubit ``i`` (qubit 0 is the leftmost letter in
the label convention used throughout)::

    (x_i, z_i) = (0, 0) -> I     (1, 0) -> X
                 (1, 1) -> Y     (0, 1) -> Z

Products, tensor products and commutators are exact (phases tracked as powers
of i); matrices enter only through the small-system oracle pair
``to_matrix`` / ``decompose_matrix``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

DROP_TOL = 1e-12
ORACLE_LIMIT = 12  # max qubit count for dense-matrix conversions

_AXIS_CHARS = "IXYZ"
_AXIS_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent k (mod 4) such that P(x1,z1) P(x2,z2) = i^k P(x1^x2, z1^z2)."""
    k = (x1 & z1).bit_count() + (x2 & z2).bit_count()
    k -= ((x1 ^ x2) & (z1 ^ z2)).bit_count()
    k += 2 * (z1 & x2).bit_count()
    return k % 4


_I_POWERS = (1, 1j, -1, -1j)


class PauliString(NamedTuple):
    """A single Pauli string with a complex coefficient."""

    n: int
    x: int
    z: int
    coeff: complex

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliString":
        x = z = 0
        for i, c in enumerate(label):
            try:
                bx, bz = _AXIS_BITS[c]
            except KeyError:
                raise ValueError(f"invalid Pauli axis {c!r} in {label!r}") from None
            x |= bx << i
            z |= bz << i
        return cls(len(label), x, z, complex(coeff))

    @property
    def label(self) -> str:
        # char indexed by x_bit + 2 z_bit: I, X, Z, Y
        return "".join(
            "IXZY"[((self.x >> i) & 1) + 2 * ((self.z >> i) & 1)]
            for i in range(self.n)
        )

    @property
    def support(self) -> int:
        """Number of non-identity axes."""
        return (self.x | self.z).bit_count()

    @property
    def is_identity_axes(self) -> bool:
        return self.x == 0 and self.z == 0

    def with_coeff(self, coeff: complex) -> "PauliString":
        return PauliString(self.n, self.x, self.z, complex(coeff))

    def dagger(self) -> "PauliString":
        # Pauli strings are hermitian, only the coefficient conjugates.
        return PauliString(self.n, self.x, self.z, self.coeff.conjugate())

    def __mul__(self, other: "PauliString") -> "PauliString":  # type: ignore[override]
        if self.n != other.n:
            raise ValueError(f"qubit-count mismatch: {self.n} vs {other.n}")
        k = _phase_exponent(self.x, self.z, other.x, other.z)
        return PauliString(
            self.n, self.x ^ other.x, self.z ^ other.z,
            self.coeff * other.coeff * _I_POWERS[k],
        )

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.coeff * other.coeff,
        )


def support(p: PauliString) -> int:
    return p.support


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Product of two Pauli strings with the accumulated phase."""
    return a * b


def _order_key(n: int, x: int, z: int) -> int:
    """Packed axis word (2 bits per qubit, qubit 0 most significant).

    Axis codes are ordered I < X < Y < Z so the induced order matches
    lexicographic order on the label string.
    """
    if n == 0:
        return 0
    # per qubit the code is (z_bit, (x^z)_bit): I=00, X=01, Y=10, Z=11
    bz = format(z, f"0{n}b")[::-1]
    bxz = format(x ^ z, f"0{n}b")[::-1]
    return 2 * int("0".join(bz), 2) + int("0".join(bxz), 2)


class ClassifyCounts(NamedTuple):
    n_real: int
    n_imag: int
    n_mixed: int


@dataclass(frozen=True)
class PauliOperator:
    """Simplified weighted sum of Pauli strings in a canonical total order.

    Instances are immutable; every constructor merges duplicate axis
    sequences, drops coefficients below the tolerance and sorts terms.
    """

    n_qubits: int
    terms: tuple[PauliString, ...]

    # -- constructors -------------------------------------------------

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[PauliString],
                   tol: float = DROP_TOL) -> "PauliOperator":
        acc: dict[tuple[int, int], complex] = {}
        for t in terms:
            if t.n != n:
                raise ValueError(f"term on {t.n} qubits in {n}-qubit operator")
            key = (t.x, t.z)
            acc[key] = acc.get(key, 0.0) + t.coeff
        return cls._from_dict(n, acc, tol)

    @classmethod
    def _from_dict(cls, n: int, acc: dict[tuple[int, int], complex],
                   tol: float = DROP_TOL) -> "PauliOperator":
        kept = [(x, z, c) for (x, z), c in acc.items() if abs(c) >= tol]
        kept.sort(key=lambda t: _order_key(n, t[0], t[1]))
        return cls(n, tuple(PauliString(n, x, z, c) for x, z, c in kept))

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "PauliOperator":
        s = PauliString.from_label(label, coeff)
        return cls.from_terms(s.n, [s])

    @classmethod
    def from_strings(cls, strings: Iterable[PauliString]) -> "PauliOperator":
        strings = list(strings)
        if not strings:
            raise ValueError("cannot infer qubit count from empty iterable")
        return cls.from_terms(strings[0].n, strings)

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "PauliOperator":
        return cls.from_terms(n, [PauliString(n, 0, 0, complex(coeff))])

    @classmethod
    def zero(cls, n: int) -> "PauliOperator":
        return cls(n, ())

    # -- basic queries ------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, label_or_string: "str | PauliString") -> complex:
        if isinstance(label_or_string, str):
            probe = PauliString.from_label(label_or_string)
        else:
            probe = label_or_string
        for t in self.terms:
            if t.x == probe.x and t.z == probe.z:
                return t.coeff
        return 0.0

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch in operator sum")
        return PauliOperator.from_terms(
            self.n_qubits, list(self.terms) + list(other.terms))

    def __sub__(self, other: "PauliOperator") -> "PauliOperator":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliOperator":
        return (-1.0) * self

    def scale(self, c: complex) -> "PauliOperator":
        if c == 0:
            return PauliOperator.zero(self.n_qubits)
        return PauliOperator(
            self.n_qubits,
            tuple(t.with_coeff(t.coeff * c) for t in self.terms))

    def __rmul__(self, c: complex) -> "PauliOperator":
        if isinstance(c, (int, float, complex)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other: "PauliOperator | complex") -> "PauliOperator":
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch in operator product")
        acc: dict[tuple[int, int], complex] = {}
        for a in self.terms:
            for b in other.terms:
                k = _phase_exponent(a.x, a.z, b.x, b.z)
                key = (a.x ^ b.x, a.z ^ b.z)
                acc[key] = acc.get(key, 0.0) + a.coeff * b.coeff * _I_POWERS[k]
        return PauliOperator._from_dict(self.n_qubits, acc)

    def dagger(self) -> "PauliOperator":
        return PauliOperator(self.n_qubits,
                             tuple(t.dagger() for t in self.terms))

    def embed(self, n_total: int, offset: int = 0) -> "PauliOperator":
        """View this operator on a larger register, shifted by ``offset``."""
        if offset < 0 or offset + self.n_qubits > n_total:
            raise ValueError("embedding range out of register")
        return PauliOperator(
            n_total,
            tuple(PauliString(n_total, t.x << offset, t.z << offset, t.coeff)
                  for t in self.terms))


def tensor(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Tensor product; a's qubits first, then b's."""
    return PauliOperator.from_terms(
        a.n_qubits + b.n_qubits,
        [ta.tensor(tb) for ta in a.terms for tb in b.terms])


def commutator(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    return a * b - b * a


def simplify(op: PauliOperator, tol: float = DROP_TOL) -> PauliOperator:
    """Re-merge like terms and drop coefficients with |c| < tol."""
    return PauliOperator.from_terms(op.n_qubits, op.terms, tol=tol)


def classify(op: PauliOperator, tol: float = DROP_TOL) -> ClassifyCounts:
    """Partition term coefficients into purely real / purely imaginary / mixed."""
    n_real = n_imag = n_mixed = 0
    for t in op.terms:
        re, im = abs(t.coeff.real), abs(t.coeff.imag)
        if im < tol:
            n_real += 1
        elif re < tol:
            n_imag += 1
        else:
            n_mixed += 1
    return ClassifyCounts(n_real, n_imag, n_mixed)


def is_hermitian(op: PauliOperator, tol: float = DROP_TOL) -> bool:
    return all(abs(t.coeff.imag) < tol for t in op.terms)


def drop_identity(op: PauliOperator) -> tuple[PauliOperator, complex]:
    """Remove the identity-axes term; returns (operator, dropped shift)."""
    shift = 0.0
    kept = []
    for t in op.terms:
        if t.is_identity_axes:
            shift += t.coeff
        else:
            kept.append(t)
    return PauliOperator(op.n_qubits, tuple(kept)), shift


# -- dense-matrix oracle ----------------------------------------------
#
# Qubit 0 is the most significant bit of the computational-basis index,
# matching kron(q0, q1, ..., q_{n-1}).


def _index_mask(mask: int, n: int) -> int:
    """Map a qubit bitmask (bit i = qubit i) to an index bitmask (qubit 0 = MSB)."""
    if n == 0:
        return 0
    return int(format(mask, f"0{n}b")[::-1], 2) if mask else 0


def string_action(p: PauliString) -> tuple[int, np.ndarray]:
    """Matrix-free action of the axes of ``p`` on basis indices.

    Returns (flip, phases) with P|j> = phases[j] |j ^ flip| for the unit
    coefficient string; the coefficient is not included.
    """
    n = p.n
    xm = _index_mask(p.x, n)
    zm = _index_mask(p.z, n)
    idx = np.arange(1 << n, dtype=np.int64)
    par = np.bitwise_count(idx & zm) & 1
    phases = (1j) ** ((p.x & p.z).bit_count() % 4) * np.where(par, -1.0, 1.0)
    return xm, phases.astype(complex)


def to_matrix(op: PauliOperator) -> np.ndarray:
    """Dense matrix of the operator (small systems only)."""
    n = op.n_qubits
    if n > ORACLE_LIMIT:
        raise ValueError(f"to_matrix limited to {ORACLE_LIMIT} qubits, got {n}")
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for t in op.terms:
        flip, phases = string_action(t)
        m[idx ^ flip, idx] += t.coeff * phases
    return m


def _block_decompose(m: np.ndarray, prefix_x: int, prefix_z: int, qubit: int,
                     out: dict[tuple[int, int], complex]) -> None:
    if m.shape[0] == 1:
        c = m[0, 0]
        if c != 0:
            out[(prefix_x, prefix_z)] = c
        return
    h = m.shape[0] // 2
    a, b = m[:h, :h], m[:h, h:]
    c_, d = m[h:, :h], m[h:, h:]
    bit = 1 << qubit
    for x, z, blk in (
        (0, 0, (a + d) / 2),
        (bit, 0, (b + c_) / 2),
        (bit, bit, 1j * (b - c_) / 2),
        (0, bit, (a - d) / 2),
    ):
        if np.any(blk):
            _block_decompose(blk, prefix_x | x, prefix_z | z, qubit + 1, out)


def decompose_matrix(m: np.ndarray, tol: float = DROP_TOL) -> PauliOperator:
    """Pauli decomposition with Hilbert-Schmidt coefficients Tr(P m)/2^n."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > ORACLE_LIMIT:
        raise ValueError(f"decompose_matrix limited to {ORACLE_LIMIT} qubits")
    # The recursion splits on the most significant index bit, which is qubit 0.
    out: dict[tuple[int, int], complex] = {}
    _block_decompose(m, 0, 0, 0, out)
    return PauliOperator._from_dict(n, out, tol)


# -- serialization ----------------------------------------------------


def operator_to_json(op: PauliOperator) -> str:
    """JSON array of {"coeff": [re, im], "axes": "XIZY..."} with qubit 0 leftmost."""
    payload = [
        {"coeff": [t.coeff.real, t.coeff.imag], "axes": t.label}
        for t in op.terms
    ]
    return json.dumps(payload)


def operator_from_json(text: str, n_qubits: int | None = None) -> PauliOperator:
    payload = json.loads(text)
    if not payload and n_qubits is None:
        raise ValueError("empty operator needs an explicit qubit count")
    strings = [
        PauliString.from_label(item["axes"],
                               complex(item["coeff"][0], item["coeff"][1]))
        for item in payload
    ]
    n = n_qubits if n_qubits is not None else strings[0].n
    # bit-exact round trip: merging must not alter lone coefficients
    return PauliOperator.from_terms(n, strings, tol=0.0)
