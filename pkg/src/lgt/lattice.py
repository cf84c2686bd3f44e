"""Hypercubic lattice topology and the qubit register layout.

Sites are integer d-tuples indexed row-major over the extents. A link is the
pair (site, direction) normalized to the positive direction; the same link is
reachable from the head site with the negated direction. Static boundary
links (open boundary only) carry fixed classical flux values and never own
qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

Site = tuple[int, ...]


class Link(NamedTuple):
    site: Site       # tail of the link
    direction: int   # 0-based spatial direction


class Plaquette(NamedTuple):
    site: Site
    k: int
    j: int           # k < j; loop traverses (x,k), (x+k,j), (x+j,k)^†, (x,j)^†


@dataclass(frozen=True)
class StaticLink:
    """A boundary link held at a fixed physical flux value (units of e)."""

    site: Site
    direction: int
    flux: float


@dataclass(frozen=True)
class LatticeSpec:
    d: int
    extents: tuple[int, ...]
    boundary: str = "periodic"  # "periodic" | "open"
    static_links: tuple[StaticLink, ...] = ()

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.extents) != self.d:
            raise ValueError("extents length must equal d")
        if any(e < 1 for e in self.extents):
            raise ValueError("every extent must be >= 1")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.static_links and self.boundary != "open":
            raise ValueError("static links require open boundary")
        for sl in self.static_links:
            if self.contains(sl.site) and self.contains(self.shift(sl.site, sl.direction)):
                raise ValueError(
                    f"static link {sl} lies inside the dynamical region")

    # -- geometry ------------------------------------------------------

    def contains(self, site: Site) -> bool:
        return all(0 <= c < e for c, e in zip(site, self.extents))

    def shift(self, site: Site, direction: int, sign: int = +1) -> Site:
        out = list(site)
        out[direction] += sign
        return tuple(out)

    def wrap(self, site: Site) -> Site:
        return tuple(c % e for c, e in zip(site, self.extents))

    def neighbor(self, site: Site, direction: int, sign: int = +1) -> Site | None:
        """Neighboring site, or None if it falls off an open boundary."""
        raw = self.shift(site, direction, sign)
        if self.boundary == "periodic":
            return self.wrap(raw)
        return raw if self.contains(raw) else None

    def site_index(self, site: Site) -> int:
        idx = 0
        for c, e in zip(site, self.extents):
            idx = idx * e + c
        return idx

    @property
    def n_sites(self) -> int:
        return math.prod(self.extents)

    @property
    def n_links(self) -> int:
        if self.boundary == "periodic":
            return self.d * self.n_sites
        total = 0
        for k in range(self.d):
            per_dir = self.extents[k] - 1
            total += per_dir * (self.n_sites // self.extents[k])
        return total

    @property
    def n_plaquettes(self) -> int:
        if self.d < 2:
            return 0
        total = 0
        for k in range(self.d):
            for j in range(k + 1, self.d):
                anchors = 1
                for i, e in enumerate(self.extents):
                    if self.boundary == "open" and i in (k, j):
                        anchors *= e - 1
                    else:
                        anchors *= e
                total += anchors
        return total

    def sites(self) -> Iterator[Site]:
        def rec(prefix: list[int], axis: int):
            if axis == self.d:
                yield tuple(prefix)
                return
            for c in range(self.extents[axis]):
                prefix.append(c)
                yield from rec(prefix, axis + 1)
                prefix.pop()

        yield from rec([], 0)

    def links(self) -> list[Link]:
        out = []
        for site in self.sites():
            for k in range(self.d):
                if self.neighbor(site, k) is not None:
                    out.append(Link(site, k))
        return out

    def plaquettes(self) -> list[Plaquette]:
        out = []
        for site in self.sites():
            for k in range(self.d):
                for j in range(k + 1, self.d):
                    corner = self.neighbor(site, k)
                    if corner is None:
                        continue
                    if self.neighbor(site, j) is None:
                        continue
                    if self.neighbor(corner, j) is None:
                        continue
                    out.append(Plaquette(site, k, j))
        return out

    def normalize_link(self, site: Site, direction: int) -> Link:
        """Canonical form of a link given by (x, +k) or (x + k, -k)."""
        if direction >= 0:
            base = self.wrap(site) if self.boundary == "periodic" else site
            return Link(base, direction)
        k = -direction - 1
        base = self.shift(site, k, -1)
        if self.boundary == "periodic":
            base = self.wrap(base)
        return Link(base, k)

    def static_flux(self, site: Site, direction: int) -> float | None:
        """Flux of the static link with tail ``site`` along ``direction``."""
        for sl in self.static_links:
            if sl.site == tuple(site) and sl.direction == direction:
                return sl.flux
        return None


class LatticeCensus(NamedTuple):
    sites: list[Site]
    links: list[Link]
    plaquettes: list[Plaquette]
    n_sites: int
    n_links: int
    n_plaquettes: int


def enumerate_lattice(spec: LatticeSpec) -> LatticeCensus:
    sites = list(spec.sites())
    links = spec.links()
    plaq = spec.plaquettes()
    assert len(sites) == spec.n_sites
    assert len(links) == spec.n_links
    assert len(plaq) == spec.n_plaquettes
    return LatticeCensus(sites, links, plaq, len(sites), len(links), len(plaq))


def spinor_components(d: int) -> int:
    """Spinor component count: 2^(d/2) for even d, 2^((d+1)/2) for odd d."""
    return 2 ** (d // 2) if d % 2 == 0 else 2 ** ((d + 1) // 2)


def gauge_qubits_per_link(encoding: str, spin: float) -> int:
    d_s = int(round(2 * spin + 1))
    if encoding == "log":
        return max(1, math.ceil(math.log2(d_s)))
    if encoding == "linear":
        return d_s
    raise ValueError(f"unsupported encoding {encoding!r}")


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit assignment: fermionic qubits site-major first, then gauge link-major."""

    spec: LatticeSpec
    n_spinor: int
    encoding: str
    spin: float
    links: tuple[Link, ...] = field(default=())

    def __post_init__(self):
        if not self.links:
            object.__setattr__(self, "links", tuple(self.spec.links()))

    @property
    def qubits_per_link(self) -> int:
        return gauge_qubits_per_link(self.encoding, self.spin)

    @property
    def n_fermionic(self) -> int:
        return self.spec.n_sites * self.n_spinor

    @property
    def n_gauge(self) -> int:
        return len(self.links) * self.qubits_per_link

    @property
    def n_total(self) -> int:
        return self.n_fermionic + self.n_gauge

    def fermionic_mode(self, site: Site, component: int) -> int:
        """Fermionic mode index (equals its qubit index under all mappings)."""
        if not 0 <= component < self.n_spinor:
            raise ValueError("spinor component out of range")
        return self.spec.site_index(site) * self.n_spinor + component

    def link_index(self, link: Link) -> int:
        return self.links.index(link)

    def gauge_offset(self, link: Link) -> int:
        return self.n_fermionic + self.link_index(link) * self.qubits_per_link


def layout(spec: LatticeSpec, n_spinor: int, encoding: str, spin: float) -> RegisterLayout:
    expected = spinor_components(spec.d)
    if n_spinor != expected:
        raise ValueError(
            f"n_spinor={n_spinor} inconsistent with d={spec.d} (expected {expected})")
    return RegisterLayout(spec, n_spinor, encoding, spin)


def qubit_totals(extents: tuple[int, ...], boundary: str, encoding: str,
                 spin: float) -> tuple[int, int, int]:
    """(total, fermionic, gauge) qubit counts without materializing the lattice."""
    d = len(extents)
    spec = LatticeSpec(d, tuple(extents), boundary)
    n_f = spec.n_sites * spinor_components(d)
    n_g = spec.n_links * gauge_qubits_per_link(encoding, spin)
    return n_f + n_g, n_f, n_g
