"""Geometry of the L x L square lattice on a torus.

Sites are indexed row-major: site(r, c) = r*L + c. Bonds carry the degrees of
freedom of both models and are indexed with all horizontal bonds first:

* horizontal bond ``s`` joins site ``s`` to its right neighbour (column + 1 mod L),
* vertical bond ``L*L + s`` joins site ``s`` to its down neighbour (row + 1 mod L).

A star is the set of 4 bonds incident to a site; a plaquette is the set of
4 bonds bounding the face whose top-left corner is a given site. Both wrap
periodically, so every bond belongs to exactly 2 stars and 2 plaquettes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TorusLattice:
    """Incidence structure of the periodic square lattice.

    Attributes
    ----------
    L : int
        Linear size (sites per row).
    n_sites, n_bonds, n_plaquettes : int
        L^2, 2 L^2 and L^2 respectively.
    star_bonds_array : (L^2, 4) int array
        Bonds incident to each site.
    plaquette_bonds_array : (L^2, 4) int array
        Bonds around each face.
    bond_sites : (2 L^2, 2) int array
        Endpoint sites of each bond.

    The arrays are read-only; instances are safe to share between threads.
    """

    L: int
    n_sites: int = field(init=False)
    n_bonds: int = field(init=False)
    n_plaquettes: int = field(init=False)
    star_bonds_array: np.ndarray = field(init=False, repr=False)
    plaquette_bonds_array: np.ndarray = field(init=False, repr=False)
    bond_sites: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.L < 2:
            raise ValueError(
                f"L must be >= 2, got {self.L} (on L=1 every bond is a self-loop)"
            )
        L = self.L
        n = L * L
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "n_bonds", 2 * n)
        object.__setattr__(self, "n_plaquettes", n)

        star = np.empty((n, 4), dtype=np.int64)
        plaq = np.empty((n, 4), dtype=np.int64)
        ends = np.empty((2 * n, 2), dtype=np.int64)
        for r in range(L):
            for c in range(L):
                s = r * L + c
                right = r * L + (c + 1) % L
                left = r * L + (c - 1) % L
                down = ((r + 1) % L) * L + c
                up = ((r - 1) % L) * L + c
                # incident bonds: own horizontal, left neighbour's horizontal,
                # own vertical, up neighbour's vertical
                star[s] = (s, left, n + s, n + up)
                # face with corners s, right, down, down-right
                plaq[s] = (s, down, n + s, n + right)
                ends[s] = (s, right)
                ends[n + s] = (s, down)
        for a in (star, plaq, ends):
            a.setflags(write=False)
        object.__setattr__(self, "star_bonds_array", star)
        object.__setattr__(self, "plaquette_bonds_array", plaq)
        object.__setattr__(self, "bond_sites", ends)

    def star_bonds(self, site: int) -> tuple[int, int, int, int]:
        """The 4 bonds incident to ``site``."""
        self._check_index(site, self.n_sites, "site")
        return tuple(int(b) for b in self.star_bonds_array[site])

    def plaquette_bonds(self, face: int) -> tuple[int, int, int, int]:
        """The 4 bonds around the face anchored at site index ``face``."""
        self._check_index(face, self.n_plaquettes, "plaquette")
        return tuple(int(b) for b in self.plaquette_bonds_array[face])

    def bond_endpoints(self, bond: int) -> tuple[int, int]:
        """The 2 distinct endpoint sites of ``bond``."""
        self._check_index(bond, self.n_bonds, "bond")
        return tuple(int(s) for s in self.bond_sites[bond])

    @staticmethod
    def _check_index(i: int, n: int, kind: str) -> None:
        if not 0 <= i < n:
            raise IndexError(f"{kind} index {i} out of range [0, {n})")


def build_torus(L: int) -> TorusLattice:
    """Construct the lattice; L must be an integer >= 2."""
    if not isinstance(L, (int, np.integer)):
        raise TypeError(f"L must be an integer, got {type(L).__name__}")
    return TorusLattice(int(L))


def incidence(lattice: TorusLattice, query: str, index: int):
    """Uniform incidence lookup.

    ``query`` is one of ``"star"``, ``"plaquette"`` (returning 4 bond indices)
    or ``"bond"`` (returning the 2 endpoint sites).
    """
    if query == "star":
        return lattice.star_bonds(index)
    if query == "plaquette":
        return lattice.plaquette_bonds(index)
    if query == "bond":
        return lattice.bond_endpoints(index)
    raise ValueError(f"unknown incidence query {query!r}")
