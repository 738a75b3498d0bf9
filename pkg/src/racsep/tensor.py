"""Dense tensors over a switchable scalar field, with matricization.

Two scalar fields are supported: IEEE double ("float") and exact rationals
("exact", backed by ``fractions.Fraction`` in object arrays).  A tensor never
mixes fields.  Entries are kept in row-major order (last index fastest), so
matricization w.r.t. an index partition reduces to an axis permutation
followed by a reshape.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import FieldMismatchError, InvalidInputError, ShapeError

EXACT = "exact"
FLOAT = "float"


def exact_array(values, shape=None):
    """Build an object ndarray of Fractions from nested ints/Fractions/strings."""
    arr = np.array(values, dtype=object)
    flat = arr.reshape(-1)
    for i, v in enumerate(flat):
        flat[i] = Fraction(v)
    arr = flat.reshape(arr.shape)
    if shape is not None:
        arr = arr.reshape(shape)
    return arr


def field_of(array):
    return EXACT if array.dtype == object else FLOAT


def _check_same_field(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"cannot mix {a.field} and {b.field} tensors")


class DenseTensor:
    """An order-T multi-dimensional array over a single scalar field.

    ``data`` is a numpy array shaped ``dims``; dtype float64 for the float
    field, object (holding Fractions) for the exact field.
    """

    __slots__ = ("data", "field")

    def __init__(self, data, field=None):
        data = np.asarray(data)
        if data.ndim < 1:
            data = data.reshape(1)
        if field is None:
            field = field_of(data)
        if field == EXACT and data.dtype != object:
            data = exact_array(data)
        elif field == FLOAT:
            data = data.astype(np.float64, copy=False)
        self.data = data
        self.field = field

    @classmethod
    def from_entries(cls, dims, entries, field):
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims):
            raise ShapeError(f"all dims must be >= 1, got {dims}")
        n = int(np.prod(dims))
        entries = list(entries)
        if len(entries) != n:
            raise ShapeError(f"expected {n} entries, got {len(entries)}")
        if field == EXACT:
            data = exact_array(entries, shape=dims)
        else:
            data = np.array(entries, dtype=np.float64).reshape(dims)
        return cls(data, field)

    @classmethod
    def zeros(cls, dims, field):
        if field == EXACT:
            data = np.full(dims, Fraction(0), dtype=object)
        else:
            data = np.zeros(dims)
        return cls(data, field)

    @property
    def dims(self):
        return self.data.shape

    @property
    def order(self):
        return self.data.ndim

    @property
    def entries(self):
        """Flat row-major view of the entries."""
        return self.data.reshape(-1)

    def to_float(self):
        if self.field == FLOAT:
            return self
        return DenseTensor(self.data.astype(np.float64), FLOAT)

    def __getitem__(self, idx):
        return self.data[idx]

    def equals(self, other):
        if self.field != other.field or self.dims != other.dims:
            return False
        return bool(np.all(self.data == other.data))

    def __repr__(self):
        return f"DenseTensor(dims={self.dims}, field={self.field!r})"


@dataclass(frozen=True)
class IndexPartition:
    """A split of the modes {1..T} into disjoint sorted groups S and E."""

    S: tuple
    E: tuple

    def __post_init__(self):
        s, e = tuple(sorted(self.S)), tuple(sorted(self.E))
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "E", e)
        if set(s) & set(e):
            raise ShapeError("S and E must be disjoint")
        T = len(s) + len(e)
        if set(s) | set(e) != set(range(1, T + 1)):
            raise ShapeError("S and E must cover {1..T} exactly")

    @classmethod
    def start_end(cls, T):
        """The canonical first-half/second-half split; T must be even."""
        if T % 2 != 0:
            raise ShapeError(f"start-end partition needs even T, got {T}")
        return cls(tuple(range(1, T // 2 + 1)), tuple(range(T // 2 + 1, T + 1)))

    @property
    def order(self):
        return len(self.S) + len(self.E)


def tensor_product(a: DenseTensor, b: DenseTensor) -> DenseTensor:
    """Outer product: result order is order(a) + order(b)."""
    _check_same_field(a, b)
    return DenseTensor(np.multiply.outer(a.data, b.data), a.field)


def matricize(t: DenseTensor, p: IndexPartition) -> DenseTensor:
    """Rearrange an order-T tensor as an M^|S| x M^|E| matrix.

    Entry (d_1..d_T) lands in row 1 + sum_t (d_{i_t}-1) M^(|S|-t) and the
    analogous column over E.  All modes must share one dimension M.
    """
    if p.order != t.order:
        raise ShapeError(f"partition covers {p.order} modes, tensor has {t.order}")
    dims = set(t.dims)
    if len(dims) != 1:
        raise ShapeError(f"matricize requires equal mode dims, got {t.dims}")
    M = dims.pop()
    axes = [i - 1 for i in p.S] + [i - 1 for i in p.E]
    arr = np.transpose(t.data, axes).reshape(M ** len(p.S), M ** len(p.E))
    return DenseTensor(arr, t.field)


def dematricize(m: DenseTensor, p: IndexPartition, M: int) -> DenseTensor:
    """Inverse of :func:`matricize` for a tensor of equal mode dims M."""
    if m.order != 2:
        raise ShapeError("dematricize expects an order-2 tensor")
    T = p.order
    arr = m.data.reshape((M,) * T)
    axes = [i - 1 for i in p.S] + [i - 1 for i in p.E]
    inverse = np.argsort(axes)
    return DenseTensor(np.transpose(arr, inverse), m.field)


def hadamard_power(m: DenseTensor, p: int) -> DenseTensor:
    """Raise every entry to the integer power p, shape preserved."""
    if p < 1:
        raise InvalidInputError(f"power must be a positive integer, got {p}")
    return DenseTensor(m.data ** p, m.field)


# ---------------------------------------------------------------------------
# Portable text format: header (order, dims, field), row-major entries,
# rationals as "num/den".

FORMAT_TAG = "racsep-tensor v1"


def dump_tensor(t: DenseTensor) -> str:
    lines = [FORMAT_TAG, f"order {t.order}", "dims " + " ".join(map(str, t.dims)),
             f"field {t.field}"]
    if t.field == EXACT:
        lines += [f"{v.numerator}/{v.denominator}" for v in t.entries]
    else:
        lines += [np.format_float_scientific(v, unique=True) for v in t.entries]
    return "\n".join(lines) + "\n"


def parse_tensor(text: str) -> DenseTensor:
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != FORMAT_TAG:
        raise InvalidInputError("not a tensor file (bad header)")
    order = int(lines[1].split()[1])
    dims = tuple(int(x) for x in lines[2].split()[1:])
    if len(dims) != order:
        raise InvalidInputError("dims line does not match order")
    field = lines[3].split()[1]
    raw = lines[4:]
    if field == EXACT:
        entries = [Fraction(s) for s in raw]
    else:
        entries = [float(s) for s in raw]
    return DenseTensor.from_entries(dims, entries, field)


def save_tensor(t: DenseTensor, path):
    with open(path, "w") as fh:
        fh.write(dump_tensor(t))


def load_tensor(path) -> DenseTensor:
    with open(path) as fh:
        return parse_tensor(fh.read())
