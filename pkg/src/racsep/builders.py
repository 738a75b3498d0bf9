"""Coefficient tensors and grid tensors of multiplicative recurrent networks.

A single-layer multiplicative network evaluated for T steps has a closed
form: the score is a full contraction of an order-T coefficient tensor (the
weights tensor) with the per-step input encodings.  The weights tensor is
assembled by a tensor-train recursion of bond rank R.  Grid tensors hold raw
network outputs on every length-T symbol sequence and exist for any depth.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ParameterError, ResourceBudgetError, ShapeError
from .network import (RAC_PRODUCT, InputSequence, Nonlinearity, RacParams,
                      TemplateEncoder, _coerce_seq, neutral_h0, step_deep)
from .tensor import DenseTensor

GRID_BUDGET_ENV = "RACSEP_GRID_BUDGET"
DEFAULT_GRID_BUDGET = 10 ** 7


def grid_budget():
    return int(os.environ.get(GRID_BUDGET_ENV, DEFAULT_GRID_BUDGET))


@dataclass(frozen=True)
class WeightsTensor:
    tensor: DenseTensor
    class_index: int
    tt_rank: int


@dataclass(frozen=True)
class GridTensor:
    tensor: DenseTensor
    depth: int
    class_index: int


def build_weights_tensor(p: RacParams, c: int = 1, T: int = 2) -> WeightsTensor:
    """Tensor-train assembly of the order-T coefficient tensor for class c.

    With phi_t holding R tensors of order t, the recursion is

        phi_1[b] = sum_a Wh[b,a] * Wi[a,:]
        phi_t[b] = sum_a Wh[b,a] * (phi_{t-1}[a] x Wi[a,:])
        A        = sum_a Wo[c,a] * (phi_{T-1}[a] x Wi[a,:])

    which reproduces the step-by-step forward pass with the neutral initial
    state Wh^-1 1 (the first hidden multiplication cancels against h0).
    """
    if p.L != 1:
        raise ParameterError("weights tensor is defined for single-layer networks")
    if T < 2:
        raise ShapeError(f"T must be >= 2, got {T}")
    if not 1 <= c <= p.C:
        raise ParameterError(f"class index {c} out of range [1..{p.C}]")
    neutral_h0(p.w_hidden[0])  # raises on singular hidden weights
    wi, wh = p.w_in[0], p.w_hidden[0]
    R = p.R
    phi = [sum(wh[b, a] * wi[a] for a in range(R)) for b in range(R)]
    for _ in range(2, T):
        phi = [
            sum(wh[b, a] * np.multiply.outer(phi[a], wi[a]) for a in range(R))
            for b in range(R)
        ]
    out = p.w_out[c - 1]
    A = sum(out[a] * np.multiply.outer(phi[a], wi[a]) for a in range(R))
    return WeightsTensor(tensor=DenseTensor(A, p.field), class_index=c, tt_rank=R)


def score_from_tensor(w: WeightsTensor, enc: TemplateEncoder, seq) -> object:
    """Full contraction sum_d A_d prod_i F[seq_i, d_i]; a single entry lookup
    when the encoder is the identity."""
    symbols = _coerce_seq(seq)
    t = w.tensor
    if len(symbols) != t.order:
        raise ShapeError(f"sequence length {len(symbols)} != tensor order {t.order}")
    acc = t.data
    for s in symbols:
        acc = np.tensordot(enc.row(s), acc, axes=([0], [0]))
    return acc if np.ndim(acc) == 0 else acc[()]


def build_grid_tensor(p: RacParams, g: Nonlinearity = RAC_PRODUCT,
                      enc: TemplateEncoder = None, c: int = 1, T: int = 2,
                      budget: int = None) -> GridTensor:
    """Order-T tensor of network outputs over all M^T template sequences.

    Enumeration shares hidden states across common prefixes, so the cost is
    one network step per grid-trie node rather than T steps per leaf.
    """
    if enc is None:
        enc = TemplateEncoder.identity(p.M, p.field)
    if not 1 <= c <= p.C:
        raise ParameterError(f"class index {c} out of range [1..{p.C}]")
    M = p.M
    if budget is None:
        budget = grid_budget()
    required = M ** T
    if required > budget:
        raise ResourceBudgetError(
            f"grid tensor needs {required} entries, budget is {budget}",
            required=required, budget=budget)

    out = DenseTensor.zeros((M,) * T, p.field)

    def walk(states, prefix):
        if len(prefix) == T:
            out.data[tuple(s - 1 for s in prefix)] = (p.w_out @ states[-1])[c - 1]
            return
        for d in range(1, M + 1):
            walk(step_deep(p, g, states, enc.row(d)), prefix + (d,))

    walk(list(p.h0), ())
    return GridTensor(tensor=out, depth=p.L, class_index=c)
