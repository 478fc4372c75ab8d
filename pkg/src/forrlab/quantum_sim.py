"""One-query quantum procedure for the forrelation decision problem.

The closed form is exact: the accept probability is (1 + forrelation)/2 as
a dyadic rational.  A direct state-vector simulation of the circuit (one
control qubit plus n data qubits, phase oracle, controlled Hadamard layer,
Hadamard on the control, measure the control) is kept as an independent
cross-check for small n; all amplitudes stay real throughout.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .boolfun import Dyadic, TruthTable, forrelation

STATEVEC_MAX_ARITY = 10


@dataclass(frozen=True)
class QuantumOutcome:
    accept_prob: Dyadic
    sampled_bit: str | None = None  # "accept" | "reject"


def accept_probability(f: TruthTable, g: TruthTable) -> Dyadic:
    """Exact acceptance probability (1 + forrelation(f, g)) / 2."""
    if f.n != g.n:
        raise ValueError("arity mismatch")
    return forrelation(f, g).halve_shifted()


def sample_outcome(f: TruthTable, g: TruthTable, rng: random.Random) -> str:
    p = accept_probability(f, g)
    return "accept" if rng.random() < float(p) else "reject"


def simulate(f: TruthTable, g: TruthTable, rng: random.Random | None = None) -> QuantumOutcome:
    """Closed-form outcome record, with an optional sampled measurement."""
    prob = accept_probability(f, g)
    bit = None if rng is None else ("accept" if rng.random() < float(prob) else "reject")
    return QuantumOutcome(prob, bit)


def _apply_h(state: np.ndarray, qubit: int) -> None:
    """Hadamard on one qubit of a real state vector, in place."""
    step = 1 << qubit
    size = state.size
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    view = state.reshape(size // (2 * step), 2, step)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = (lo + hi) * inv_sqrt2
    view[:, 1, :] = (lo - hi) * inv_sqrt2


def _apply_ch(state: np.ndarray, control: int, target: int) -> None:
    """Hadamard on target, applied only where the control qubit is 1."""
    size = state.size
    idx = np.arange(size)
    sel = (idx >> control) & 1 == 1
    lo_idx = idx[sel & ((idx >> target) & 1 == 0)]
    hi_idx = lo_idx | (1 << target)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    lo = state[lo_idx].copy()
    hi = state[hi_idx]
    state[lo_idx] = (lo + hi) * inv_sqrt2
    state[hi_idx] = (lo - hi) * inv_sqrt2


def statevector_accept_probability(f: TruthTable, g: TruthTable) -> float:
    """Gate-by-gate circuit simulation; independent of the closed form.

    Layout: data qubits are bits 0..n-1 of the state index, the control is
    bit n.  The oracle multiplies |0>|x> by f(x) and |1>|x> by g(x); the
    truth tables are consumed exactly once, to build that single phase
    layer.
    """
    if f.n != g.n:
        raise ValueError("arity mismatch")
    n = f.n
    if n > STATEVEC_MAX_ARITY:
        raise ValueError(f"state-vector path capped at arity {STATEVEC_MAX_ARITY}")
    size = 1 << (n + 1)
    state = np.full(size, 1.0 / np.sqrt(size))

    phases = np.concatenate([f.signs_array().astype(np.float64),
                             g.signs_array().astype(np.float64)])
    state *= phases

    for target in range(n):
        _apply_ch(state, n, target)
    _apply_h(state, n)

    # accept = control measured 0
    return float(np.dot(state[: size // 2], state[: size // 2]))
