"""Statevector simulation: Pauli-exponential kernels, Trotter and exact
evolution, physical observables, and configuration readout.

Basis convention: qubit 0 is the most significant bit of the computational
basis index (matching ``lgt.pauli.to_matrix``). Pauli actions are applied
matrix-free; index permutations and Z-parity sign vectors are cached per
(n, mask) so repeated Trotter steps touch each amplitude only a few times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from lgt.gauge import check_spin, flux_state_index
from lgt.hamiltonian import HamiltonianTerms
from lgt.lattice import RegisterLayout
from lgt.matter import FermionMapping
from lgt.pauli import ORACLE_LIMIT, PauliOperator, PauliString, to_matrix

DENSE_LIMIT = 10     # auto-switch point: eigh cost grows steeply past this
MAX_DENSE = 13       # hard cap for an explicitly requested dense path
KRYLOV_LIMIT = 24    # iterative exponential-apply path


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def loschmidt(state0: StateVector, state_t: StateVector) -> float:
    """|<phi_0 | phi_t>|^2, the survival probability of the initial state."""
    if state0.n_qubits != state_t.n_qubits:
        raise ValueError("state size mismatch")
    return float(abs(np.vdot(state0.amps, state_t.amps)) ** 2)


# -- cached mask kernels -------------------------------------------------

_PERM_CACHE: dict[tuple[int, int], np.ndarray] = {}
_SIGN_CACHE: dict[tuple[int, int], np.ndarray] = {}
_ARANGE_CACHE: dict[int, np.ndarray] = {}


def clear_kernel_caches() -> None:
    _PERM_CACHE.clear()
    _SIGN_CACHE.clear()
    _ARANGE_CACHE.clear()


def _indices(n: int) -> np.ndarray:
    arr = _ARANGE_CACHE.get(n)
    if arr is None:
        arr = np.arange(1 << n, dtype=np.int64)
        _ARANGE_CACHE[n] = arr
    return arr


def _index_mask(mask: int, n: int) -> int:
    """Qubit mask (bit i = qubit i) to index mask (qubit 0 = MSB)."""
    return int(format(mask, f"0{n}b")[::-1], 2) if mask else 0


def _perm(n: int, xm: int) -> np.ndarray:
    key = (n, xm)
    perm = _PERM_CACHE.get(key)
    if perm is None:
        perm = _indices(n) ^ xm
        _PERM_CACHE[key] = perm
    return perm


def _signs(n: int, zm: int) -> np.ndarray:
    """(-1)^parity(index & zm) as a float vector."""
    key = (n, zm)
    signs = _SIGN_CACHE.get(key)
    if signs is None:
        par = (np.bitwise_count(_indices(n) & zm) & 1).astype(bool)
        signs = np.where(par, -1.0, 1.0)
        _SIGN_CACHE[key] = signs
    return signs


def _string_masks(p: PauliString) -> tuple[int, int, complex]:
    """(index xmask, index zmask, i^|Y|) of a string's axes."""
    n = p.n
    return (_index_mask(p.x, n), _index_mask(p.z, n),
            (1j) ** ((p.x & p.z).bit_count() % 4))


def apply_pauli_string(state: StateVector, p: PauliString) -> np.ndarray:
    """Amplitudes of coeff * P |state| without materializing a matrix."""
    n = state.n_qubits
    xm, zm, ypow = _string_masks(p)
    out = state.amps * _signs(n, zm) if zm else state.amps.copy()
    if xm:
        out = out[_perm(n, xm)]
    if ypow != 1 or p.coeff != 1:
        out *= p.coeff * ypow
    return out


def apply_pauli_exp(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """state <- exp(-i theta P_axes) state, in place; coefficient ignored."""
    n = state.n_qubits
    xm, zm, ypow = _string_masks(p)
    if xm == 0 and zm == 0:
        state.amps *= np.exp(-1j * theta)
        return state
    if xm == 0:
        signs = _signs(n, zm)
        state.amps *= np.where(signs > 0, np.exp(-1j * theta), np.exp(1j * theta))
        return state
    # exp(-i t P) = cos(t) I - i sin(t) P, with P^2 = I
    moved = state.amps * _signs(n, zm) if zm else state.amps
    moved = moved[_perm(n, xm)]
    state.amps = math.cos(theta) * state.amps - (1j * math.sin(theta) * ypow) * moved
    return state


class OperatorAction:
    """Matrix-free H|psi> with strings grouped by their index-flip mask."""

    def __init__(self, op: PauliOperator):
        self.n = op.n_qubits
        n = self.n
        groups: dict[int, np.ndarray] = {}
        for t in op.terms:
            xm, zm, ypow = _string_masks(t)
            diag = groups.get(xm)
            if diag is None:
                diag = np.zeros(1 << n, dtype=complex)
                groups[xm] = diag
            diag += (t.coeff * ypow) * _signs(n, zm)
        self.groups = sorted(groups.items())

    def __call__(self, amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps)
        for xm, diag in self.groups:
            tmp = diag * amps
            if xm:
                out += tmp[_perm(self.n, xm)]
            else:
                out += tmp
        return out

    def expectation(self, state: StateVector) -> float:
        return float(np.vdot(state.amps, self(state.amps)).real)


# -- Trotter -------------------------------------------------------------

ORDERINGS = ("canonical", "by_term_group", "reversed")


@dataclass(frozen=True)
class TrotterPlan:
    n_qubits: int
    strings: tuple[PauliString, ...]  # real coefficients; angle = coeff * dt
    dt: float
    n_steps: int
    ordering: str = "canonical"

    @property
    def total_time(self) -> float:
        return self.dt * self.n_steps


def trotter_plan(h: HamiltonianTerms | PauliOperator, dt: float, n_steps: int,
                 ordering: str = "canonical") -> TrotterPlan:
    """Per-Pauli-string first-order product formula plan."""
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}")
    if isinstance(h, HamiltonianTerms):
        if ordering == "by_term_group":
            strings = tuple(t for _, op in h.named_terms() for t in op.terms)
        else:
            strings = h.total.terms
        n = h.layout.n_total
    else:
        strings = h.terms
        n = h.n_qubits
        if ordering == "by_term_group":
            raise ValueError("by_term_group ordering needs HamiltonianTerms")
    if ordering == "reversed":
        strings = tuple(reversed(strings))
    bad = [t for t in strings if abs(t.coeff.imag) > 1e-10]
    if bad:
        raise ValueError("Trotter plan requires hermitian (real) coefficients")
    return TrotterPlan(n, strings, dt, n_steps, ordering)


def trotter_step(state: StateVector, plan: TrotterPlan) -> StateVector:
    for t in plan.strings:
        apply_pauli_exp(state, t, t.coeff.real * plan.dt)
    return state


def trotter_states(state0: StateVector, plan: TrotterPlan):
    """Yield (t, state) after every Trotter step, starting from (0, state0)."""
    state = state0.copy()
    yield 0.0, state
    for step in range(1, plan.n_steps + 1):
        trotter_step(state, plan)
        yield step * plan.dt, state


# -- exact evolution -----------------------------------------------------


class ExactEvolver:
    """e^{-iHt} via dense eigendecomposition or Lanczos exponential-apply."""

    def __init__(self, h: PauliOperator, method: str = "auto",
                 dense_limit: int = DENSE_LIMIT, tol: float = 1e-10):
        self.n = h.n_qubits
        self.tol = tol
        if method == "auto":
            method = "dense" if self.n <= dense_limit else "krylov"
        if method == "dense" and self.n > MAX_DENSE:
            raise ValueError(f"dense evolution limited to {MAX_DENSE} qubits")
        if method == "krylov" and self.n > KRYLOV_LIMIT:
            raise ValueError(f"evolution limited to {KRYLOV_LIMIT} qubits")
        self.method = method
        if method == "dense":
            m = to_matrix(h)
            self._evals, self._evecs = np.linalg.eigh(m)
            self._action = None
        elif method == "krylov":
            self._action = OperatorAction(h)
        else:
            raise ValueError(f"unknown method {method!r}")

    def evolve(self, state: StateVector, t: float) -> StateVector:
        if state.n_qubits != self.n:
            raise ValueError("state size mismatch")
        if t == 0.0:
            return state.copy()
        if self.method == "dense":
            phases = np.exp(-1j * self._evals * t)
            coeffs = self._evecs.conj().T @ state.amps
            return StateVector(self.n, self._evecs @ (phases * coeffs))
        return StateVector(self.n, _krylov_expm(self._action, state.amps,
                                                t, self.tol))

    def energy(self, state: StateVector) -> float:
        if self.method == "dense":
            coeffs = self._evecs.conj().T @ state.amps
            return float(np.sum(self._evals * np.abs(coeffs) ** 2))
        return self._action.expectation(state)


def _lanczos(action, v: np.ndarray, m: int):
    """Lanczos tridiagonalization with full reorthogonalization."""
    dim = v.shape[0]
    m = min(m, dim)
    vs = np.zeros((m + 1, dim), dtype=complex)
    alphas = np.zeros(m)
    betas = np.zeros(m + 1)
    beta0 = np.linalg.norm(v)
    vs[0] = v / beta0
    k = 0
    for k in range(m):
        w = action(vs[k])
        alphas[k] = np.vdot(vs[k], w).real
        w = w - alphas[k] * vs[k]
        if k:
            w = w - betas[k] * vs[k - 1]
        # full reorthogonalization; the subspaces here are small
        w = w - vs[:k + 1].T @ (vs[:k + 1].conj() @ w)
        beta = np.linalg.norm(w)
        betas[k + 1] = beta
        if beta < 1e-14:
            return vs[:k + 1], alphas[:k + 1], betas[1:k + 1], beta0, True
        vs[k + 1] = w / beta
    return vs[:m], alphas[:m], betas[1:m], beta0, False


def _krylov_expm(action, v: np.ndarray, t: float, tol: float,
                 m: int = 40) -> np.ndarray:
    """exp(-i t H) v by adaptive Lanczos substepping (Saad error estimate)."""
    from scipy.linalg import expm

    remaining = float(t)
    sign = 1.0 if t >= 0 else -1.0
    remaining = abs(remaining)
    out = v
    dt = remaining
    while remaining > 1e-15:
        dt = min(dt, remaining)
        vs, alphas, betas, beta0, exactspan = _lanczos(action, out, m)
        k = len(alphas)
        tri = np.diag(alphas).astype(complex)
        if k > 1:
            tri += np.diag(betas[:k - 1], 1) + np.diag(betas[:k - 1], -1)
        while True:
            u = expm(-1j * sign * dt * tri)[:, 0]
            if exactspan:
                break
            # residual estimate: weight leaking out of the Krylov space
            h_next = betas[k - 1] if k - 1 < len(betas) else 0.0
            err = abs(h_next * u[-1]) * abs(dt)
            if err < tol or dt < 1e-12:
                break
            dt /= 2
        out = (vs.T @ u) * beta0
        remaining -= dt
        dt *= 2
    return out


# -- observables and configuration readout --------------------------------


def _qubit_bits(n: int, qubits: list[int]) -> np.ndarray:
    """(len(idx), len(qubits)) bit table for the given qubits."""
    idx = _indices(n)
    return np.stack([(idx >> (n - 1 - q)) & 1 for q in qubits], axis=1)


@dataclass(frozen=True)
class DiagonalObservable:
    name: str
    values: np.ndarray

    def expectation(self, state: StateVector) -> float:
        return float(np.dot(state.probabilities(), self.values))


def mode_occupations(layout: RegisterLayout, mapping: FermionMapping) -> np.ndarray:
    """(2^n, n_modes) occupation table of the encoded basis states."""
    n = layout.n_total
    idx = _indices(n)
    cols = []
    for mask in mapping.occupation_masks():
        im = _index_mask(mask, n)
        cols.append((np.bitwise_count(idx & im) & 1).astype(np.int8))
    return np.stack(cols, axis=1)


def link_flux_table(layout: RegisterLayout, theta_along) -> np.ndarray:
    """(2^n, n_links) physical flux per link; NaN on out-of-window states."""
    n = layout.n_total
    d_s = check_spin(layout.spin)
    qpl = layout.qubits_per_link
    idx = _indices(n)
    cols = []
    for li, link in enumerate(layout.links):
        off = layout.n_fermionic + li * qpl
        val = np.zeros(len(idx), dtype=np.int64)
        for b in range(qpl):
            val = (val << 1) | ((idx >> (n - 1 - off - b)) & 1)
        theta = theta_along(link.direction)
        if layout.encoding == "log":
            flux = np.where(val < d_s, layout.spin - val + theta, np.nan)
        else:
            hot = np.zeros(len(idx), dtype=np.int64)
            count = np.zeros(len(idx), dtype=np.int64)
            for b in range(qpl):
                bit = (idx >> (n - 1 - off - b)) & 1
                count += bit
                hot = np.where(bit == 1, b, hot)
            # one-hot qubit b marks m = b - S reading the register left to right
            flux = np.where(count == 1, hot - layout.spin + theta, np.nan)
        cols.append(flux)
    return np.stack(cols, axis=1) if cols else np.zeros((len(idx), 0))


def standard_observables(layout: RegisterLayout, mapping: FermionMapping,
                         params) -> list[DiagonalObservable]:
    """Total particle number, per-site charge, per-link flux (all diagonal)."""
    occ = mode_occupations(layout, mapping)
    n_sp = layout.n_spinor
    obs = []
    total_n = np.zeros(occ.shape[0])
    half = n_sp // 2
    for s in range(layout.spec.n_sites):
        block = occ[:, s * n_sp:(s + 1) * n_sp]
        # gamma^0 = diag(+1 ... +1, -1 ... -1) in all supported representations
        nbar = block[:, :half].sum(axis=1) - block[:, half:].sum(axis=1) + half
        total_n = total_n + nbar
        charge = params.e * (block.sum(axis=1) - n_sp / 2.0)
        obs.append(DiagonalObservable(f"charge_site{s}", charge))
    obs.insert(0, DiagonalObservable("total_particle_number", total_n))
    flux = link_flux_table(layout, params.theta_along)
    for li in range(flux.shape[1]):
        obs.append(DiagonalObservable(f"flux_link{li}",
                                      np.nan_to_num(flux[:, li] * params.e)))
    return obs


SITE_CHARS = {(0, 1): "o", (1, 1): "p", (0, 0): "a", (1, 0): "b"}


def basis_config_label(layout: RegisterLayout, mapping: FermionMapping,
                       theta_along, index: int) -> str:
    """Physical label of one computational basis state, e.g. 'pao|1;0;0'.

    Site letters: o vacuum, p particle, a antiparticle, b pair; the flux list
    is semicolon-separated (CSV-safe) in link order, x marking out-of-window
    link states.
    """
    n = layout.n_total
    occ_row = []
    for mask in mapping.occupation_masks():
        im = _index_mask(mask, n)
        occ_row.append((index & im).bit_count() & 1)
    n_sp = layout.n_spinor
    sites = []
    for s in range(layout.spec.n_sites):
        block = tuple(occ_row[s * n_sp:(s + 1) * n_sp])
        sites.append(SITE_CHARS.get(block, "{" + "".join(map(str, block)) + "}"))
    d_s = check_spin(layout.spin)
    qpl = layout.qubits_per_link
    fluxes = []
    for li, link in enumerate(layout.links):
        off = layout.n_fermionic + li * qpl
        val = 0
        for b in range(qpl):
            val = (val << 1) | ((index >> (n - 1 - off - b)) & 1)
        theta = theta_along(link.direction)
        if layout.encoding == "log":
            fluxes.append(_flux_str(layout.spin - val + theta) if val < d_s else "x")
        else:
            bits = [(index >> (n - 1 - off - b)) & 1 for b in range(qpl)]
            if sum(bits) == 1:
                fluxes.append(_flux_str(bits.index(1) - layout.spin + theta))
            else:
                fluxes.append("x")
    return "".join(sites) + "|" + ";".join(fluxes)


def _flux_str(value: float) -> str:
    if abs(value - round(value)) < 1e-9:
        return str(int(round(value)))
    return f"{value:g}"


def config_probabilities(state: StateVector, layout: RegisterLayout,
                         mapping: FermionMapping, params,
                         threshold: float = 1e-12) -> dict[str, float]:
    """Probabilities grouped by lattice configuration label."""
    probs = state.probabilities()
    out: dict[str, float] = {}
    for index in np.nonzero(probs > threshold)[0]:
        label = basis_config_label(layout, mapping, params.theta_along, int(index))
        out[label] = out.get(label, 0.0) + float(probs[index])
    return dict(sorted(out.items(), key=lambda kv: -kv[1]))


def top_configs(config_probs: dict[str, float], k: int = 12) -> list[tuple[str, float]]:
    """Highest-probability labels; everything past the k-th aggregates to 'other'."""
    items = list(config_probs.items())
    head = items[:k]
    rest = sum(p for _, p in items[k:])
    if rest > 0:
        head.append(("other", rest))
    return head


# -- Gauss-law filtering ---------------------------------------------------


def gauss_filter(layout: RegisterLayout, mapping: FermionMapping, params
                 ) -> tuple[int, list[int]]:
    """Enumerate physical configurations and keep those with G_x = 0 at
    every site; returns (total configuration count, invariant basis indices)."""
    import itertools

    spec = layout.spec
    if layout.n_total > KRYLOV_LIMIT:
        raise ValueError("configuration enumeration limited to small systems")
    d_s = check_spin(layout.spin)
    n_sp = layout.n_spinor
    sites = list(spec.sites())
    links = list(layout.links)
    link_pos = {link: i for i, link in enumerate(links)}

    site_occs = list(itertools.product((0, 1), repeat=n_sp))
    total = 0
    kept = []
    for link_ms in itertools.product(range(d_s), repeat=len(links)):
        flux = [layout.spin - l + params.theta_along(links[i].direction)
                for i, l in enumerate(link_ms)]

        def flux_at(base, k):
            head_in = spec.boundary == "periodic" or spec.contains(spec.shift(base, k))
            base_in = spec.contains(spec.wrap(base) if spec.boundary == "periodic" else base)
            if base_in and head_in:
                return flux[link_pos[spec.normalize_link(base, k)]]
            static = spec.static_flux(base, k)
            return static if static is not None else 0.0

        for occ_choice in itertools.product(site_occs, repeat=len(sites)):
            total += 1
            ok = True
            for si, site in enumerate(sites):
                g = sum(occ_choice[si]) - n_sp / 2.0
                for k in range(spec.d):
                    g += flux_at(spec.shift(site, k, -1), k) - flux_at(site, k)
                if abs(g) > 1e-9:
                    ok = False
                    break
            if ok:
                occs = [b for site_occ in occ_choice for b in site_occ]
                index = mapping.encode_occupations(occs) << (layout.n_total
                                                             - mapping.n_modes)
                for i, l in enumerate(link_ms):
                    m_val = layout.spin - l
                    local = flux_state_index(layout.spin, layout.encoding, m_val)
                    off = layout.n_fermionic + i * layout.qubits_per_link
                    index |= local << (layout.n_total - off - layout.qubits_per_link)
                kept.append(index)
    return total, sorted(kept)
