"""Real-valued functions on the phase space and the pointwise algebra they form.

An observable is stored as a dense table with one value per configuration
index.  All algebra is entrywise, so commutativity/associativity hold exactly.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import (
    IncompleteLocalTable,
    LatticeError,
    NonFiniteValue,
    PhaseSpaceMismatch,
    TableLengthMismatch,
    UnknownConfiguration,
)
from .phase import PhaseSpace, Region

# Idempotence tolerance: exactly-constructed indicators are checked exactly;
# tables coming out of floating arithmetic may use the relaxed mode.
TAU_IDEM = 0.0
TAU_IDEM_FLOAT = 1e-12


@dataclass(frozen=True)
class Observable:
    """A total real-valued function on the phase space, as a value table."""

    space: PhaseSpace
    values: np.ndarray
    support: Region | None = field(default=None, compare=False)
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.space.size,):
            raise TableLengthMismatch(
                f"value table has shape {values.shape}, phase space has {self.space.size} configurations"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("observable table contains NaN or infinity")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __call__(self, x) -> float:
        return self.eval(x)

    def eval(self, x) -> float:
        """Value at a configuration, given as a site-value tuple or an index."""
        if isinstance(x, (int, np.integer)):
            if not 0 <= int(x) < self.space.size:
                raise UnknownConfiguration(f"configuration index {x} out of range")
            return float(self.values[int(x)])
        return float(self.values[self.space.index_of(x)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Observable)
            and self.space == other.space
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:
        return hash((self.space, self.values.tobytes()))

    def __add__(self, other):
        return pointwise_combine("add", self, other)

    def __sub__(self, other):
        return pointwise_combine("sub", self, other)

    def __mul__(self, other):
        return pointwise_combine("mul", self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return pointwise_combine("scale", self, -1.0)

    def with_name(self, name: str) -> "Observable":
        return Observable(self.space, self.values, support=self.support, name=name)

    def __repr__(self) -> str:
        label = self.name or "observable"
        return f"<{label} on {self.space.size} configs, sup-norm {sup_norm(self):g}>"


def _coerce_operand(f: Observable, g) -> np.ndarray:
    if isinstance(g, Observable):
        if g.space != f.space:
            raise PhaseSpaceMismatch("operands live on different phase spaces")
        return g.values
    return np.float64(g)


def pointwise_combine(op: str, f: Observable, g=None) -> Observable:
    """Entrywise algebra; ``g`` may be an observable or a scalar.

    ``op`` is one of add, sub, mul, scale, min, max.  ``scale`` takes the
    scalar in ``g``.
    """
    a = f.values
    if op == "scale":
        out = a * np.float64(g)
    else:
        b = _coerce_operand(f, g)
        if op == "add":
            out = a + b
        elif op == "sub":
            out = a - b
        elif op == "mul":
            out = a * b
        elif op == "min":
            out = np.minimum(a, b)
        elif op == "max":
            out = np.maximum(a, b)
        else:
            raise LatticeError(f"unknown pointwise op {op!r}")
    return Observable(f.space, out)


def sup_norm(f: Observable) -> float:
    if f.space.size == 0:
        return 0.0
    return float(np.max(np.abs(f.values)))


def is_idempotent(f: Observable, tol: float = TAU_IDEM) -> bool:
    """True when every value is 0 or 1 within ``tol`` (exactly, by default)."""
    v = f.values
    return bool(np.all((np.abs(v) <= tol) | (np.abs(v - 1.0) <= tol)))


def local_observable(space: PhaseSpace, region: Region, local_fn) -> Observable:
    """Cylinder extension of a function on the local configurations of a region.

    ``local_fn`` may be a sequence indexed by local rank, a mapping keyed by
    local configuration tuples, or a callable.  Two local functions on
    different regions that represent the same global function produce equal
    value tables.
    """
    locals_ = space.local_configurations(region)
    if callable(local_fn):
        table = [float(local_fn(lc)) for lc in locals_]
    elif isinstance(local_fn, Mapping):
        try:
            table = [float(local_fn[lc]) for lc in locals_]
        except KeyError as exc:
            raise IncompleteLocalTable(f"local table missing configuration {exc}") from exc
    else:
        table = [float(v) for v in local_fn]
        if len(table) != len(locals_):
            raise IncompleteLocalTable(
                f"local table has {len(table)} entries, region needs {len(locals_)}"
            )
    ranks = space.local_rank_column(region)
    values = np.asarray(table, dtype=np.float64)[ranks]
    return Observable(space, values, support=region)


# ---------------------------------------------------------------------------
# Built-in observables
# ---------------------------------------------------------------------------

def constant(space: PhaseSpace, c: float) -> Observable:
    return Observable(space, np.full(space.size, float(c)), name=f"const({c:g})")


def spin(space: PhaseSpace, site) -> Observable:
    """The symbol value at one site."""
    values = space.site_values(site)
    coord = site if isinstance(site, tuple) else (site,)
    label = ",".join(str(c) for c in coord)
    return Observable(space, values, support=Region.of(site), name=f"spin({label})")


def magnetization(space: PhaseSpace) -> Observable:
    values = np.zeros(space.size)
    for site in space.sites:
        values += space.site_values(site)
    return Observable(space, values, name="magnetization")


def energy(space: PhaseSpace) -> Observable:
    """Nearest-neighbour coupling -sum s_i s_j over lattice bonds."""
    values = np.zeros(space.size)
    for a, b in space.bonds():
        values -= space.site_values(a) * space.site_values(b)
    return Observable(space, values, name="energy")


def occupation(space: PhaseSpace) -> Observable:
    """Number of sites carrying the largest alphabet symbol (particle count)."""
    top = space.alphabet[-1]
    values = np.zeros(space.size)
    for site in space.sites:
        values += (space.site_values(site) == top).astype(np.float64)
    return Observable(space, values, name="occupation")


def indicator(space: PhaseSpace, predicate: Callable[[tuple], bool], name: str | None = None) -> Observable:
    """Indicator of the configurations satisfying a predicate on site tuples."""
    mask = np.fromiter(
        (bool(predicate(space.configuration(k))) for k in range(space.size)),
        dtype=bool,
        count=space.size,
    )
    return Observable(space, mask.astype(np.float64), name=name or "indicator")


def indicator_from_mask(space: PhaseSpace, mask: np.ndarray, name: str | None = None) -> Observable:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (space.size,):
        raise TableLengthMismatch(f"mask has shape {mask.shape}, expected ({space.size},)")
    return Observable(space, mask.astype(np.float64), name=name)


_BUILTINS: dict[str, Callable[[PhaseSpace], Observable]] = {
    "magnetization": magnetization,
    "energy": energy,
    "occupation": occupation,
}

_SPIN_RE = re.compile(r"^spin\(([-\d,\s]+)\)$")
_INDICATOR_RE = re.compile(r"^indicator\((.+)\)$")
_PREDICATE_RE = re.compile(
    r"^\s*([a-z_]+(?:\([-\d,\s]+\))?)\s*(==|!=|<=|>=|<|>|in)\s*(.+?)\s*$"
)


def observable_from_name(space: PhaseSpace, name: str) -> Observable:
    """Resolve a named observable: built-ins, ``spin(i)``, ``indicator(...)``.

    Indicator predicates compare a named observable against a value, e.g.
    ``indicator(magnetization==0)`` or ``indicator(energy in [-3,-1])``.
    """
    name = name.strip()
    if name in _BUILTINS:
        return _BUILTINS[name](space)
    m = _SPIN_RE.match(name)
    if m:
        coord = tuple(int(c) for c in m.group(1).split(","))
        return spin(space, coord if len(coord) > 1 else coord[0])
    m = _INDICATOR_RE.match(name)
    if m:
        return _indicator_from_predicate(space, m.group(1)).with_name(name)
    raise LatticeError(f"unknown observable name {name!r}")


def _indicator_from_predicate(space: PhaseSpace, text: str) -> Observable:
    m = _PREDICATE_RE.match(text)
    if not m:
        raise LatticeError(f"cannot parse indicator predicate {text!r}")
    base = observable_from_name(space, m.group(1))
    op, rhs = m.group(2), m.group(3)
    v = base.values
    if op == "in":
        rhs = rhs.strip()
        if not (rhs.startswith("[") and rhs.endswith("]")):
            raise LatticeError(f"'in' expects a closed interval [lo,hi], got {rhs!r}")
        lo, hi = (float(p) for p in rhs[1:-1].split(","))
        mask = (v >= lo) & (v <= hi)
    else:
        val = float(rhs)
        mask = {
            "==": v == val,
            "!=": v != val,
            "<=": v <= val,
            ">=": v >= val,
            "<": v < val,
            ">": v > val,
        }[op]
    return indicator_from_mask(space, mask)


# ---------------------------------------------------------------------------
# CSV import/export: rows of (config_index, value)
# ---------------------------------------------------------------------------

def write_observable_csv(f: Observable, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["config_index", "value"])
        for k, v in enumerate(f.values):
            writer.writerow([k, f"{v:.17g}"])


def read_observable_csv(space: PhaseSpace, path: str) -> Observable:
    values = np.zeros(space.size)
    seen = np.zeros(space.size, dtype=bool)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["config_index", "value"]:
            raise LatticeError(f"{path}: expected header config_index,value")
        for row in reader:
            k = int(row[0])
            if not 0 <= k < space.size:
                raise UnknownConfiguration(f"{path}: config index {k} out of range")
            values[k] = float(row[1])
            seen[k] = True
    if not seen.all():
        raise IncompleteLocalTable(f"{path}: covers {int(seen.sum())} of {space.size} configurations")
    return Observable(space, values)
