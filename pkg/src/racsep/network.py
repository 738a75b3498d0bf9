"""Step-by-step recurrent network evaluation (multiplicative and additive).

The multiplicative update merges hidden state and input by element-wise
product: h_t = (W_h h_{t-1}) * (W_i f(x_t)).  The additive variant
h_t = act(W_h h_{t-1} + W_i f(x_t)) is provided for demos only; all rank
analyses use the multiplicative form.  Inputs are symbols in [1..M] mapped
through a template encoder: f(x^(d)) is row d of the encoder matrix F.
Biases are omitted throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError, ParameterError
from .ranks import rank_exact, rank_numeric
from .tensor import EXACT, FLOAT, exact_array, field_of


@dataclass(frozen=True)
class Nonlinearity:
    kind: str  # "rac" | "rnn"
    activation: str = "identity"  # rnn only: "identity" | "tanh"

    def apply(self, a, b):
        if self.kind == "rac":
            return a * b
        s = a + b
        if self.activation == "tanh":
            return np.tanh(s)
        return s


RAC_PRODUCT = Nonlinearity("rac")


def rnn_additive(activation="identity"):
    return Nonlinearity("rnn", activation)


def exact_identity(n):
    eye = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        eye[i, i] = Fraction(1)
    return eye


def solve_exact(a, b):
    """Solve a x = b over the rationals; raises ParameterError if singular."""
    n = a.shape[0]
    aug = [[Fraction(a[i, j]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise ParameterError("singular matrix")
        aug[k], aug[piv] = aug[piv], aug[k]
        pk = aug[k][k]
        for i in range(n):
            if i != k and aug[i][k] != 0:
                f = aug[i][k] / pk
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
    return np.array([aug[i][n] / aug[i][i] for i in range(n)], dtype=object)


def neutral_h0(w_hidden):
    """Initial state solving W_h h0 = 1, so the first update sees all-ones."""
    n = w_hidden.shape[0]
    if field_of(w_hidden) == EXACT:
        ones = np.array([Fraction(1)] * n, dtype=object)
        return solve_exact(w_hidden, ones)
    try:
        return np.linalg.solve(w_hidden, np.ones(n))
    except np.linalg.LinAlgError:
        raise ParameterError("singular hidden weights matrix") from None


@dataclass
class RacParams:
    """All learned weights and initial hidden states of an L-layer network.

    w_in[0] is R x M; deeper w_in are R x R.  Every w_hidden is R x R and
    w_out is C x R.  h0 defaults to the neutral choice W_h^-1 1 per layer
    (requires invertible hidden matrices).
    """

    w_in: list
    w_hidden: list
    w_out: np.ndarray
    h0: list = None
    field: str = field(init=False, default=None)

    def __post_init__(self):
        if len(self.w_in) != len(self.w_hidden):
            raise ParameterError("w_in and w_hidden must have one matrix per layer")
        if not self.w_in:
            raise ParameterError("at least one layer required")
        self.field = field_of(self.w_in[0])
        mats = list(self.w_in) + list(self.w_hidden) + [self.w_out]
        if any(field_of(m) != self.field for m in mats):
            raise ParameterError("all weight matrices must share one scalar field")
        R = self.w_in[0].shape[0]
        for l, m in enumerate(self.w_in):
            expected = (R, self.M) if l == 0 else (R, R)
            if m.shape != expected:
                raise ParameterError(f"w_in[{l}] must be {expected}, got {m.shape}")
        for l, m in enumerate(self.w_hidden):
            if m.shape != (R, R):
                raise ParameterError(f"w_hidden[{l}] must be ({R},{R}), got {m.shape}")
        if self.w_out.shape[1] != R:
            raise ParameterError(f"w_out must have {R} columns")
        if self.h0 is None:
            self.h0 = [neutral_h0(w) for w in self.w_hidden]
        if len(self.h0) != self.L or any(h.shape != (R,) for h in self.h0):
            raise ParameterError("h0 must hold one length-R vector per layer")

    @property
    def L(self):
        return len(self.w_in)

    @property
    def R(self):
        return self.w_in[0].shape[0]

    @property
    def M(self):
        return self.w_in[0].shape[1]

    @property
    def C(self):
        return self.w_out.shape[0]


@dataclass(frozen=True)
class TemplateEncoder:
    """Fixed input grid: F[d-1] is the encoding of the d-th template symbol."""

    F: np.ndarray

    def __post_init__(self):
        if self.F.ndim != 2 or self.F.shape[0] != self.F.shape[1]:
            raise ParameterError("encoder matrix must be square")
        if field_of(self.F) == EXACT:
            full = rank_exact(self.F).rank == self.M
        else:
            full = rank_numeric(self.F).rank == self.M
        if not full:
            raise ParameterError("encoder matrix must be non-singular")

    @classmethod
    def identity(cls, M, field=EXACT):
        if field == EXACT:
            return cls(exact_identity(M))
        return cls(np.eye(M))

    @property
    def M(self):
        return self.F.shape[0]

    @property
    def field(self):
        return field_of(self.F)

    def row(self, symbol):
        return self.F[symbol - 1]


@dataclass(frozen=True)
class InputSequence:
    """Symbols in [1..M], one per time-step."""

    symbols: tuple

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if any(s < 1 for s in self.symbols):
            raise InvalidInputError("symbols are 1-based positive integers")

    def __len__(self):
        return len(self.symbols)


def _coerce_seq(seq):
    return seq.symbols if isinstance(seq, InputSequence) else tuple(seq)


def _check_compat(p: RacParams, enc: TemplateEncoder, symbols):
    if enc.M != p.M:
        raise ParameterError(f"encoder dim {enc.M} != network input dim {p.M}")
    if enc.field != p.field:
        raise ParameterError("encoder and parameters must share one scalar field")
    if any(s > p.M for s in symbols):
        raise InvalidInputError(f"symbol out of range [1..{p.M}]")


def step_deep(p: RacParams, g: Nonlinearity, states, encoded):
    """Advance every layer one time-step; returns the new per-layer states."""
    below = encoded
    new = []
    for l in range(p.L):
        h = g.apply(p.w_hidden[l] @ states[l], p.w_in[l] @ below)
        new.append(h)
        below = h
    return new


def forward_deep(p: RacParams, g: Nonlinearity, enc: TemplateEncoder, seq):
    """Class scores after the final time-step of an L-layer network."""
    symbols = _coerce_seq(seq)
    _check_compat(p, enc, symbols)
    states = list(p.h0)
    for s in symbols:
        states = step_deep(p, g, states, enc.row(s))
    return p.w_out @ states[-1]


def forward_shallow(p: RacParams, g: Nonlinearity, enc: TemplateEncoder, seq):
    if p.L != 1:
        raise ParameterError(f"forward_shallow requires L=1, got L={p.L}")
    return forward_deep(p, g, enc, seq)


def forward_all_timesteps(p: RacParams, g: Nonlinearity, enc: TemplateEncoder, seq):
    """One class-score vector per time-step."""
    symbols = _coerce_seq(seq)
    _check_compat(p, enc, symbols)
    states = list(p.h0)
    out = []
    for s in symbols:
        states = step_deep(p, g, states, enc.row(s))
        out.append(p.w_out @ states[-1])
    return out


# ---------------------------------------------------------------------------
# Parameter serialization: flat self-describing text, matrices row-major,
# rationals stored as "num/den".

PARAMS_TAG = "racsep-params v1"


def _fmt(v, fld):
    if fld == EXACT:
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator}"
    return np.format_float_scientific(v, unique=True)


def dump_params(p: RacParams) -> str:
    lines = [PARAMS_TAG,
             f"L {p.L}", f"R {p.R}", f"M {p.M}", f"C {p.C}", f"field {p.field}"]

    def emit(name, mat):
        lines.append(f"{name} {' '.join(map(str, mat.shape))}")
        lines.extend(_fmt(v, p.field) for v in np.asarray(mat).reshape(-1))

    for l, m in enumerate(p.w_in):
        emit(f"w_in {l}", m)
    for l, m in enumerate(p.w_hidden):
        emit(f"w_hidden {l}", m)
    emit("w_out", p.w_out)
    for l, h in enumerate(p.h0):
        emit(f"h0 {l}", h)
    return "\n".join(lines) + "\n"


def parse_params(text: str) -> RacParams:
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != PARAMS_TAG:
        raise InvalidInputError("not a parameters file (bad header)")
    pos = 1
    header = {}
    for _ in range(5):
        key, val = lines[pos].split()
        header[key] = val
        pos += 1
    fld = header["field"]

    def read_block():
        nonlocal pos
        head = lines[pos].split()
        nums = [int(x) for x in head[1:]]
        if head[0] in ("w_in", "w_hidden", "h0"):
            nums = nums[1:]  # drop the layer index
        shape = tuple(nums)
        pos += 1
        count = int(np.prod(shape))
        raw = lines[pos:pos + count]
        pos += count
        if fld == EXACT:
            return exact_array([Fraction(s) for s in raw], shape=shape)
        return np.array([float(s) for s in raw]).reshape(shape)

    L = int(header["L"])
    w_in = [read_block() for _ in range(L)]
    w_hidden = [read_block() for _ in range(L)]
    w_out = read_block()
    h0 = [read_block() for _ in range(L)]
    return RacParams(w_in=w_in, w_hidden=w_hidden, w_out=w_out, h0=h0)


def save_params(p: RacParams, path):
    with open(path, "w") as fh:
        fh.write(dump_params(p))


def load_params(path) -> RacParams:
    with open(path) as fh:
        return parse_params(fh.read())
