"""Finite lattice models and their exhaustively enumerated configuration spaces.

A model is a hypercubic box of sites, each carrying one symbol from a finite
alphabet of real values.  The phase space is the full list of site->symbol
assignments in lexicographic order of site values (site 0 most significant),
so configuration index k is simply k written in base ``len(alphabet)``.  That
order is part of the contract: question bitmasks and CSV config indices are
only comparable across runs because the enumeration never changes.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EnumerationCapExceeded,
    InvalidModelSpec,
    UnknownConfiguration,
    UnknownSite,
)

DEFAULT_ENUM_CAP = 1 << 24

OPEN = "open"
PERIODIC = "periodic"

Coord = tuple[int, ...]
Configuration = tuple[float, ...]


@dataclass(frozen=True)
class ModelSpec:
    """Shape, single-site alphabet and boundary condition of a lattice model.

    The alphabet is stored sorted ascending; enumeration order derives from it.
    """

    dims: tuple[int, ...]
    alphabet: tuple[float, ...]
    boundary: str = OPEN

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise InvalidModelSpec(f"dims must be positive integers, got {self.dims!r}")
        alphabet = tuple(float(v) for v in self.alphabet)
        if not alphabet:
            raise InvalidModelSpec("alphabet must be nonempty")
        if len(set(alphabet)) != len(alphabet):
            raise InvalidModelSpec(f"alphabet values must be distinct, got {self.alphabet!r}")
        if self.boundary not in (OPEN, PERIODIC):
            raise InvalidModelSpec(f"boundary must be '{OPEN}' or '{PERIODIC}', got {self.boundary!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alphabet", tuple(sorted(alphabet)))

    @property
    def n_sites(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "alphabet": list(self.alphabet), "boundary": self.boundary}

    @staticmethod
    def from_json(obj: dict) -> "ModelSpec":
        try:
            return ModelSpec(
                dims=tuple(obj["dims"]),
                alphabet=tuple(obj["alphabet"]),
                boundary=obj.get("boundary", OPEN),
            )
        except KeyError as exc:
            raise InvalidModelSpec(f"model JSON missing key {exc}") from exc

    @staticmethod
    def from_json_file(path: str) -> "ModelSpec":
        with open(path) as fh:
            return ModelSpec.from_json(json.load(fh))


def ising_chain(n: int, boundary: str = OPEN) -> ModelSpec:
    """1D spin-half chain with symbols -1/+1."""
    return ModelSpec(dims=(n,), alphabet=(-1.0, 1.0), boundary=boundary)


@dataclass(frozen=True)
class Region:
    """A set of lattice coordinates, kept sorted for a canonical representation."""

    sites: tuple[Coord, ...]

    def __post_init__(self):
        sites = tuple(sorted(_as_coord(s) for s in self.sites))
        if len(set(sites)) != len(sites):
            raise InvalidModelSpec(f"region has duplicate sites: {self.sites!r}")
        object.__setattr__(self, "sites", sites)

    @staticmethod
    def of(*sites) -> "Region":
        return Region(tuple(sites))

    def __len__(self) -> int:
        return len(self.sites)

    def __contains__(self, site) -> bool:
        return _as_coord(site) in self.sites

    # Inclusion is the partial order on regions.
    def __le__(self, other: "Region") -> bool:
        return set(self.sites) <= set(other.sites)

    def __lt__(self, other: "Region") -> bool:
        return set(self.sites) < set(other.sites)

    def __ge__(self, other: "Region") -> bool:
        return other <= self

    def __gt__(self, other: "Region") -> bool:
        return other < self

    def __repr__(self) -> str:
        inner = ",".join(str(s[0]) if len(s) == 1 else str(s) for s in self.sites)
        return f"Region({inner})"


def _as_coord(site) -> Coord:
    if isinstance(site, tuple):
        return tuple(int(c) for c in site)
    return (int(site),)


class PhaseSpace:
    """Exhaustive, lexicographically ordered enumeration of all configurations.

    Construction never materializes the configuration table; per-site value
    columns and single configurations are decoded from the index on demand.
    """

    def __init__(self, spec: ModelSpec, enum_cap: int = DEFAULT_ENUM_CAP):
        self.spec = spec
        self.sites: tuple[Coord, ...] = tuple(itertools.product(*(range(d) for d in spec.dims)))
        self.n_sites = len(self.sites)
        self.alphabet = spec.alphabet
        self.base = len(self.alphabet)
        size = self.base**self.n_sites
        if size > enum_cap:
            raise EnumerationCapExceeded(
                f"{self.base}^{self.n_sites} = {size} configurations exceeds the cap {enum_cap}"
            )
        self.size = size
        self._site_pos = {s: i for i, s in enumerate(self.sites)}
        self._symbol_digit = {v: i for i, v in enumerate(self.alphabet)}
        self._alphabet_arr = np.array(self.alphabet, dtype=np.float64)
        self._digit_cols: dict[int, np.ndarray] = {}

    def __eq__(self, other) -> bool:
        return isinstance(other, PhaseSpace) and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"PhaseSpace(dims={self.spec.dims}, |alphabet|={self.base}, size={self.size})"

    @property
    def full_region(self) -> Region:
        return Region(self.sites)

    def site_position(self, site) -> int:
        coord = _as_coord(site)
        try:
            return self._site_pos[coord]
        except KeyError:
            raise UnknownSite(f"site {coord} is outside the lattice {self.spec.dims}") from None

    def _weight(self, pos: int) -> int:
        return self.base ** (self.n_sites - 1 - pos)

    def digit_column(self, pos: int) -> np.ndarray:
        """Alphabet digit of every configuration at site position ``pos``."""
        col = self._digit_cols.get(pos)
        if col is None:
            col = (np.arange(self.size, dtype=np.int64) // self._weight(pos)) % self.base
            col.flags.writeable = False
            self._digit_cols[pos] = col
        return col

    def site_values(self, site) -> np.ndarray:
        """Symbol value of every configuration at the given site."""
        return self._alphabet_arr[self.digit_column(self.site_position(site))]

    @cached_property
    def configs(self) -> np.ndarray:
        """Dense (size x n_sites) table of all configurations; built lazily."""
        out = np.empty((self.size, self.n_sites), dtype=np.float64)
        for pos in range(self.n_sites):
            out[:, pos] = self._alphabet_arr[self.digit_column(pos)]
        out.flags.writeable = False
        return out

    def configuration(self, k: int) -> Configuration:
        if not 0 <= k < self.size:
            raise UnknownConfiguration(f"configuration index {k} out of range [0, {self.size})")
        digits = []
        rem = int(k)
        for _ in range(self.n_sites):
            digits.append(rem % self.base)
            rem //= self.base
        return tuple(self.alphabet[d] for d in reversed(digits))

    def index_of(self, x: Sequence[float]) -> int:
        if len(x) != self.n_sites:
            raise UnknownConfiguration(
                f"configuration has {len(x)} sites, lattice has {self.n_sites}"
            )
        rank = 0
        for v in x:
            try:
                d = self._symbol_digit[float(v)]
            except (KeyError, TypeError):
                raise UnknownConfiguration(f"symbol {v!r} is not in the alphabet {self.alphabet}") from None
            rank = rank * self.base + d
        return rank

    def validate_region(self, region: Region) -> None:
        for site in region.sites:
            self.site_position(site)

    def local_size(self, region: Region) -> int:
        return self.base ** len(region)

    def local_configurations(self, region: Region) -> list[Configuration]:
        """All assignments on ``region`` in the same lexicographic order."""
        self.validate_region(region)
        return [tuple(c) for c in itertools.product(self.alphabet, repeat=len(region))]

    def local_rank_column(self, region: Region) -> np.ndarray:
        """Local-configuration rank of restrict(x, region) for every x, vectorized."""
        self.validate_region(region)
        k = len(region)
        ranks = np.zeros(self.size, dtype=np.int64)
        for j, site in enumerate(region.sites):
            ranks += self.digit_column(self.site_position(site)) * self.base ** (k - 1 - j)
        return ranks

    def bonds(self) -> list[tuple[Coord, Coord]]:
        """Nearest-neighbour site pairs along every axis, honouring the boundary."""
        pairs: set[tuple[Coord, Coord]] = set()
        for site in self.sites:
            for axis, extent in enumerate(self.spec.dims):
                nxt = list(site)
                nxt[axis] += 1
                if nxt[axis] >= extent:
                    if self.spec.boundary != PERIODIC:
                        continue
                    nxt[axis] %= extent
                neighbour = tuple(nxt)
                if neighbour == site:
                    continue  # extent-1 axis under periodic wrap
                pairs.add((min(site, neighbour), max(site, neighbour)))
        return sorted(pairs)


def build_phase_space(spec: ModelSpec, enum_cap: int = DEFAULT_ENUM_CAP) -> PhaseSpace:
    """Enumerate the configuration space of ``spec``; deterministic across runs."""
    return PhaseSpace(spec, enum_cap=enum_cap)


def restrict_configuration(space: PhaseSpace, x: Sequence[float], region: Region) -> Configuration:
    """Project a configuration onto a region (identity on the full lattice)."""
    if len(x) != space.n_sites:
        raise UnknownConfiguration(
            f"configuration has {len(x)} sites, lattice has {space.n_sites}"
        )
    return tuple(x[space.site_position(site)] for site in region.sites)


def enumerate_regions(spec: ModelSpec) -> list[Region]:
    """All contiguous sub-boxes, ordered by size so inclusions point forward.

    The full box is always last.  This finite poset stands in for the directed
    family of subsystems.
    """
    axis_intervals: list[list[range]] = [
        [range(a, b) for a in range(d) for b in range(a + 1, d + 1)] for d in spec.dims
    ]
    regions = []
    for choice in itertools.product(*axis_intervals):
        regions.append(Region(tuple(itertools.product(*choice))))
    regions.sort(key=lambda r: (len(r), r.sites))
    return regions


def region_pairs_nested(regions: Iterable[Region]) -> list[tuple[Region, Region]]:
    """All ordered pairs (r1, r2) with r1 a proper subset of r2."""
    regions = list(regions)
    return [(r1, r2) for r1 in regions for r2 in regions if r1 < r2]
