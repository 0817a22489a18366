"""Pure-NumPy statevector kernels (fallback for the compiled extension).

State layout: flat complex128 array of length 2**n, basis-state index bit k
encodes qubit k (little-endian).  All ``apply_*`` functions mutate the state
in place.  The compiled module in ``_kernels.pyx`` implements the same
signatures.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def _n_qubits(state: np.ndarray) -> int:
    return int(len(state) - 1).bit_length()


def _axis(n: int, qubit: int) -> int:
    # reshape([2]*n) orders axes most-significant first: qubit q is axis n-1-q
    return n - 1 - qubit


def apply_one_qubit(state, target, m00, m01, m10, m11):
    n = _n_qubits(state)
    view = np.moveaxis(state.reshape([2] * n), _axis(n, target), 0)
    a0 = view[0].copy()
    a1 = view[1]
    view[0] = m00 * a0 + m01 * a1
    view[1] = m10 * a0 + m11 * a1


def apply_controlled_one_qubit(state, target, control_mask, m00, m01, m10, m11):
    n = _n_qubits(state)
    view = state.reshape([2] * n)
    index = [slice(None)] * n
    before_target = 0
    for q in range(n):
        if (control_mask >> q) & 1:
            index[_axis(n, q)] = 1
            if q > target:
                before_target += 1
    sub = view[tuple(index)]
    sub = np.moveaxis(sub, _axis(n, target) - before_target, 0)
    a0 = sub[0].copy()
    a1 = sub[1]
    sub[0] = m00 * a0 + m01 * a1
    sub[1] = m10 * a0 + m11 * a1


def apply_swap(state, q0, q1):
    n = _n_qubits(state)
    view = state.reshape([2] * n)
    a, b = _axis(n, q0), _axis(n, q1)
    i01 = [slice(None)] * n
    i10 = [slice(None)] * n
    i01[a], i01[b] = 0, 1
    i10[a], i10[b] = 1, 0
    tmp = view[tuple(i01)].copy()
    view[tuple(i01)] = view[tuple(i10)]
    view[tuple(i10)] = tmp


def expect_pauli(state, x_mask, y_mask, z_mask):
    """<psi| P |psi> for the Pauli word encoded as bit masks per axis."""
    dim = len(state)
    idx = np.arange(dim, dtype=np.uint64)
    flip = np.uint64(x_mask | y_mask)
    parity = (np.bitwise_count(idx & np.uint64(y_mask | z_mask)) & 1).astype(np.float64)
    signs = 1.0 - 2.0 * parity
    n_y = int(y_mask).bit_count()
    phase = 1j ** (n_y % 4)
    bra = np.conjugate(state[(idx ^ flip).astype(np.intp)])
    return complex(phase * np.sum(bra * signs * state))


def prob_of_one(state, qubit) -> float:
    n = _n_qubits(state)
    view = np.moveaxis(state.reshape([2] * n), _axis(n, qubit), 0)
    return float(np.sum(np.abs(view[1]) ** 2))


def project_qubit(state, qubit, outcome, norm):
    """Collapse ``qubit`` to ``outcome`` and renormalize by sqrt(norm)."""
    n = _n_qubits(state)
    view = np.moveaxis(state.reshape([2] * n), _axis(n, qubit), 0)
    view[1 - outcome] = 0.0
    if norm > 0:
        view[outcome] /= np.sqrt(norm)
