"""Lattice-QED Hamiltonian terms as Pauli operators over the full register.

Conventions fixed here (and exercised by the counting tests):

* hopping/Wilson: (1/2a) sum_links psi-bar_x [i gamma^k + r] U_(x,k) psi_{x+k}
  + h.c., with the spinor structure gamma_mix = gamma^0 (i gamma^k + r);
* mass: (m + r d / a) sum_sites psi-bar psi;
* electric: (e^2/2) sum_links (Sz + theta_k)^2, static boundary links enter
  as classical constants;
* plaquette: -(1/4 e^2) sum_plaq (U1 U2 U3^dag U4^dag + h.c.);
* Gauss: G_x = e [ sum_k (flux_in - flux_out) + (psidag psi - n_spinor/2) ],
  so the half-filled bare vacuum is annihilated; H_gauss = sum_x G_x^2.

Identity-axes strings are kept in the assembled total (the resource counts
are calibrated that way); ``lgt.pauli.drop_identity`` strips them on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lgt.gauge import EncodedLink, qlm_link
from lgt.lattice import Link, RegisterLayout, Site
from lgt.matter import FermionMapping, clifford_rep, fermion_mapping, gamma_mix
from lgt.pauli import (
    DROP_TOL,
    PauliOperator,
    PauliString,
    _phase_exponent,
    _I_POWERS,
    simplify,
)


@dataclass(frozen=True)
class ModelParams:
    m: float
    r: float = 1.0
    a: float = 1.0
    e: float = 1.0
    theta: tuple[float, ...] = ()
    lam: float = 0.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("lattice spacing must be positive")
        if self.lam < 0:
            raise ValueError("Gauss penalty weight must be >= 0")

    def theta_along(self, k: int) -> float:
        return self.theta[k] if k < len(self.theta) else 0.0


def default_lambda(params: ModelParams) -> float:
    """Default Gauss penalty: well above the physical scales."""
    return 10.0 * max(params.m, params.e ** 2 / 2.0)


@dataclass(frozen=True)
class HamiltonianTerms:
    layout: RegisterLayout
    params: ModelParams
    mapping: str
    mass: PauliOperator
    hopp_wilson: PauliOperator
    elec: PauliOperator
    plaq: PauliOperator
    gauss: PauliOperator
    gauss_ops: tuple[PauliOperator, ...]
    total: PauliOperator

    @property
    def n_terms(self) -> int:
        return self.total.n_terms

    def named_terms(self) -> list[tuple[str, PauliOperator]]:
        out = [("mass", self.mass), ("hopp_wilson", self.hopp_wilson),
               ("elec", self.elec), ("plaq", self.plaq)]
        if self.params.lam:
            out.append(("gauss", self.params.lam * self.gauss))
        return out


class _Acc:
    """Coefficient accumulator keyed by symplectic masks."""

    def __init__(self, n: int):
        self.n = n
        self.data: dict[tuple[int, int], complex] = {}

    def add_string(self, x: int, z: int, c: complex) -> None:
        key = (x, z)
        self.data[key] = self.data.get(key, 0.0) + c

    def add_operator(self, op: PauliOperator, scale: complex = 1.0) -> None:
        for t in op.terms:
            self.add_string(t.x, t.z, scale * t.coeff)

    def add_product(self, a: PauliOperator, b_terms, offset: int,
                    scale: complex = 1.0) -> None:
        """a (on the full register) times strings on a shifted subregister."""
        for ta in a.terms:
            for tb in b_terms:
                xb, zb = tb.x << offset, tb.z << offset
                k = _phase_exponent(ta.x, ta.z, xb, zb)
                self.add_string(ta.x ^ xb, ta.z ^ zb,
                                scale * ta.coeff * tb.coeff * _I_POWERS[k])

    def hermitize(self) -> None:
        """Replace the accumulated T by T + T^dag (keeps 2 Re of coefficients)."""
        self.data = {k: 2 * v.real for k, v in self.data.items()
                     if abs(v.real) > 0}

    def to_operator(self, tol: float = DROP_TOL) -> PauliOperator:
        return PauliOperator._from_dict(self.n, self.data, tol)


def _encoded_links(layout: RegisterLayout, params: ModelParams) -> dict[Link, EncodedLink]:
    return {
        link: qlm_link(layout.spin, layout.encoding, params.theta_along(link.direction))
        for link in layout.links
    }


def site_psidagpsi(layout: RegisterLayout, mapping: FermionMapping,
                   site: Site, basis: str = "mapping") -> PauliOperator:
    """Total occupation of a site's spinor components.

    basis="mapping" uses the mapped number operators; basis="occupation"
    writes (I - Z)/2 per mode qubit directly, which coincides with the
    mapped form under Jordan-Wigner and is how the diagonal charge reads
    off computational basis states.
    """
    n = layout.n_total
    acc = _Acc(n)
    for alpha in range(layout.n_spinor):
        mode = layout.fermionic_mode(site, alpha)
        if basis == "occupation":
            acc.add_string(0, 0, 0.5)
            acc.add_string(0, 1 << mode, -0.5)
        elif basis == "mapping":
            acc.add_operator(mapping.number(mode).embed(n))
        else:
            raise ValueError(f"unknown charge basis {basis!r}")
    return acc.to_operator()


def site_charge_op(layout: RegisterLayout, mapping: FermionMapping,
                   site: Site, e: float) -> PauliOperator:
    """q_x = e (psidag psi - n_spinor/2); vacuum and pair sites carry zero."""
    n = layout.n_total
    shift = PauliOperator.identity(n, -layout.n_spinor / 2.0)
    return e * (site_psidagpsi(layout, mapping, site) + shift)


def site_particle_number_op(layout: RegisterLayout, mapping: FermionMapping,
                            site: Site, rep) -> PauliOperator:
    """n_x = psi-bar psi + n_spinor/2 in {0, 1, 2} per site for two components."""
    n = layout.n_total
    acc = _Acc(n)
    g0 = rep.gammas[0]
    for alpha in range(layout.n_spinor):
        for beta in range(layout.n_spinor):
            if g0[alpha, beta] == 0:
                continue
            i = layout.fermionic_mode(site, alpha)
            j = layout.fermionic_mode(site, beta)
            acc.add_operator(mapping.bilinear(i, j, g0[alpha, beta]))
    acc.add_string(0, 0, layout.n_spinor / 2.0)
    return acc.to_operator()


def build_mass(layout: RegisterLayout, params: ModelParams,
               mapping: FermionMapping) -> PauliOperator:
    rep = clifford_rep(layout.spec.d)
    coeff = params.m + params.r * layout.spec.d / params.a
    acc = _Acc(layout.n_total)
    g0 = rep.gammas[0]
    for site in layout.spec.sites():
        for alpha in range(layout.n_spinor):
            for beta in range(layout.n_spinor):
                if g0[alpha, beta] == 0:
                    continue
                i = layout.fermionic_mode(site, alpha)
                j = layout.fermionic_mode(site, beta)
                acc.add_operator(mapping.bilinear(i, j, coeff * g0[alpha, beta]))
    return acc.to_operator()


def build_hopp_wilson(layout: RegisterLayout, params: ModelParams,
                      mapping: FermionMapping,
                      links: dict[Link, EncodedLink] | None = None) -> PauliOperator:
    rep = clifford_rep(layout.spec.d)
    links = links if links is not None else _encoded_links(layout, params)
    acc = _Acc(layout.n_total)
    pref = 1.0 / (2.0 * params.a)
    for link in layout.links:
        try:
            enc = links[link]
        except KeyError:
            raise KeyError(f"missing encoded link for {link}") from None
        head = layout.spec.neighbor(link.site, link.direction)
        gmix = gamma_mix(rep, link.direction + 1, params.r)
        offset = layout.gauge_offset(link)
        for alpha in range(layout.n_spinor):
            for beta in range(layout.n_spinor):
                if gmix[alpha, beta] == 0:
                    continue
                i = layout.fermionic_mode(link.site, alpha)
                j = layout.fermionic_mode(head, beta)
                ferm = mapping.bilinear(i, j).embed(layout.n_total)
                acc.add_product(ferm, enc.u.terms, offset,
                                scale=pref * gmix[alpha, beta])
    acc.hermitize()
    return acc.to_operator()


def build_electric(layout: RegisterLayout, params: ModelParams,
                   links: dict[Link, EncodedLink] | None = None) -> PauliOperator:
    links = links if links is not None else _encoded_links(layout, params)
    acc = _Acc(layout.n_total)
    half_e2 = params.e ** 2 / 2.0
    for link in layout.links:
        acc.add_operator(links[link].e_sq.embed(layout.n_total, layout.gauge_offset(link)),
                         scale=half_e2)
    for sl in layout.spec.static_links:
        acc.add_string(0, 0, half_e2 * sl.flux ** 2)
    return acc.to_operator()


def build_plaquette(layout: RegisterLayout, params: ModelParams,
                    links: dict[Link, EncodedLink] | None = None) -> PauliOperator:
    spec = layout.spec
    if spec.d < 2:
        return PauliOperator.zero(layout.n_total)
    links = links if links is not None else _encoded_links(layout, params)
    acc = _Acc(layout.n_total)
    n = layout.n_total

    def factor(site: Site, direction: int, dagger: bool) -> PauliOperator | None:
        """U (or U^dag) of a plaquette edge; None for a static edge (U = 1)."""
        link = spec.normalize_link(site, direction)
        if link not in links:
            if spec.static_flux(link.site, link.direction) is None:
                raise KeyError(f"plaquette edge {link} is neither dynamical nor static")
            return None
        enc = links[link]
        op = enc.u_dag if dagger else enc.u
        return op.embed(n, layout.gauge_offset(link))

    for plaq in spec.plaquettes():
        x, k, j = plaq.site, plaq.k, plaq.j
        xk = spec.neighbor(x, k)
        xj = spec.neighbor(x, j)
        prod = PauliOperator.identity(n)
        for f in (factor(x, k, False), factor(xk, j, False),
                  factor(xj, k, True), factor(x, j, True)):
            if f is not None:
                prod = prod * f
        acc.add_operator(prod, scale=-1.0 / (4.0 * params.e ** 2))
    acc.hermitize()
    return acc.to_operator()


def build_gauss(layout: RegisterLayout, params: ModelParams,
                mapping: FermionMapping,
                links: dict[Link, EncodedLink] | None = None,
                charge_basis: str = "occupation",
                ) -> tuple[tuple[PauliOperator, ...], PauliOperator]:
    """Per-site Gauss operators G_x and the regulator sum_x G_x^2.

    The charge enters in the occupation picture by default (single-Z per
    mode qubit); identical to the mapped form under Jordan-Wigner.
    """
    spec = layout.spec
    links = links if links is not None else _encoded_links(layout, params)
    n = layout.n_total
    e = params.e

    def flux_term(base: Site, k: int, sign: float, acc: _Acc) -> None:
        head_ok = spec.boundary == "periodic" or spec.contains(spec.shift(base, k))
        base_in = spec.contains(spec.wrap(base) if spec.boundary == "periodic" else base)
        if base_in and head_ok:
            link = spec.normalize_link(base, k)
            acc.add_operator(links[link].e_op.embed(n, layout.gauge_offset(link)),
                             scale=sign * e)
            return
        flux = spec.static_flux(base, k)
        if flux is not None:
            acc.add_string(0, 0, sign * e * flux)

    g_ops = []
    for site in spec.sites():
        acc = _Acc(n)
        for k in range(spec.d):
            flux_term(spec.shift(site, k, -1), k, +1.0, acc)  # incoming
            flux_term(site, k, -1.0, acc)                     # outgoing
        acc.add_operator(site_psidagpsi(layout, mapping, site, charge_basis),
                         scale=e)
        acc.add_string(0, 0, -e * layout.n_spinor / 2.0)
        g_ops.append(acc.to_operator())

    total = _Acc(n)
    for g in g_ops:
        total.add_operator(g * g)
    return tuple(g_ops), total.to_operator()


def assemble(layout: RegisterLayout, params: ModelParams,
             mapping_name: str = "jw",
             gauss_charge_basis: str = "occupation") -> HamiltonianTerms:
    """Build all Hamiltonian terms and the simplified total."""
    mapping = fermion_mapping(mapping_name, layout.n_fermionic)
    links = _encoded_links(layout, params)
    mass = build_mass(layout, params, mapping)
    hopp = build_hopp_wilson(layout, params, mapping, links)
    elec = build_electric(layout, params, links)
    plaq = build_plaquette(layout, params, links)
    g_ops, gauss = build_gauss(layout, params, mapping, links,
                               charge_basis=gauss_charge_basis)
    acc = _Acc(layout.n_total)
    for op in (mass, hopp, elec, plaq):
        acc.add_operator(op)
    if params.lam:
        acc.add_operator(gauss, scale=params.lam)
    total = acc.to_operator()
    return HamiltonianTerms(layout, params, mapping_name, mass, hopp, elec,
                            plaq, gauss, g_ops, total)
