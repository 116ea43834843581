"""Matrix realizations of permutations and Brauer diagrams on (C^d)^{otimes t}."""
from itertools import permutations
import math

import numpy as np
import scipy.sparse as sp

from . import config
from .brauer import Pairing, crossing_number
from .errors import ParityError, ValidationError
from .operator import Operator


def omega(d):
    """Canonical symplectic form ``[[0, I], [-I, 0]]`` as a real ``d x d`` array."""
    if d < 2 or d % 2:
        raise ParityError(f"symplectic form needs an even d >= 2, got {d}")
    h = d // 2
    om = np.zeros((d, d))
    om[:h, h:] = np.eye(h)
    om[h:, :h] = -np.eye(h)
    return om


def _signed_permutation(om):
    """Column map ``j -> (k, s)`` with ``om[k, j] = s``, plus the row map."""
    col_target = np.argmax(np.abs(om), axis=0)
    col_sign = om[col_target, np.arange(om.shape[0])]
    row_target = np.argmax(np.abs(om), axis=1)
    row_sign = om[np.arange(om.shape[0]), row_target]
    return col_target, col_sign, row_target, row_sign


def _build(sigma, d, om=None):
    """Sparse ``F_d(sigma)``; with ``om=None`` only through-strands are allowed."""
    t = sigma.t
    dim = config.check_dim(d, t)
    # one free index per pair, all d**t assignments at once
    grids = np.indices((d,) * t).reshape(t, -1)
    out = [None] * t
    inp = [None] * t
    sign = np.ones(grids.shape[1])
    if om is not None:
        col_target, col_sign, row_target, row_sign = _signed_permutation(om)
    for (a, b), idx in zip(sigma.pairs, grids):
        if a <= t < b:
            inp[a - 1] = idx
            out[b - t - 1] = idx
        elif b <= t:
            # cap: <j|_a <j|_b Omega
            inp[a - 1] = idx
            inp[b - 1] = row_target[idx]
            sign = sign * row_sign[idx]
        else:
            # cup: |j>_a (Omega|j>)_b
            out[a - t - 1] = idx
            out[b - t - 1] = col_target[idx]
            sign = sign * col_sign[idx]
    rows = np.ravel_multi_index(out, (d,) * t)
    cols = np.ravel_multi_index(inp, (d,) * t)
    config.check_nnz(rows.size, d, t)
    return sp.csr_matrix((sign.astype(complex), (rows, cols)), shape=(dim, dim))


def perm_rep(perm, d):
    """Permutation operator ``P_d(pi)`` for ``pi`` in one-line form (0-based).

    Copy ``k`` of the input lands in copy ``perm[k]`` of the output.
    """
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(len(perm))):
        raise ValidationError(f"{perm!r} is not a permutation")
    if d < 1:
        raise ValidationError("d must be positive")
    sigma = Pairing.from_permutation(perm)
    return Operator(d, len(perm), _build(sigma, d))


def brauer_rep(sigma, d):
    """``F_d(sigma)``: through-strands are identities, a cup on top copies
    ``(a, b)`` is ``sum_j |j> (x) Omega|j>`` and a cap on bottom copies is
    ``sum_i <i| (x) <i| Omega``.

    Permutation diagrams give exactly ``perm_rep``.  With this placement a
    closed loop evaluates to ``Tr[Omega Omega] = -d`` and the ``t=2`` cup-cap
    operator is ``-|s><s|`` with ``|s> = sum_j |j>|Omega j>``.
    """
    return Operator(d, sigma.t, _build(sigma, d, omega(d)))


def algebra_rep(sigma, d):
    """Sign-twisted ``(-1)^{crossings} F_d(sigma)``.

    This is the representation of the Brauer algebra at ``delta = -d``:
    ``algebra_rep(a) @ algebra_rep(b) == (-d)**loops * algebra_rep(a o b)``.
    On permutations it equals ``sgn(pi) P_d(pi)``.
    """
    op = brauer_rep(sigma, d)
    return -op if crossing_number(sigma) % 2 else op


def rising_factorial(d, t):
    """``d (d+1) ... (d+t-1)``."""
    return math.prod(range(d, d + t))


def sym_projector(t, d):
    """Trace-one projector ``sum_pi P_d(pi) / (d (d+1) ... (d+t-1))``."""
    config.check_dim(d, t)
    total = None
    for perm in permutations(range(t)):
        m = perm_rep(perm, d).sparse()
        total = m if total is None else total + m
    return Operator(d, t, total / rising_factorial(d, t))


def orthogonal_brauer_rep(sigma, d):
    """Brauer diagram with plain ``sum_j |jj>`` cups and caps (commutant of O(d))."""
    return Operator(d, sigma.t, _build(sigma, d, np.eye(d)))


def levi_civita_operator(d):
    """``sum eps_{abcd} |ab><cd|`` on two copies of C^4.

    Invariant under ``O (x) O`` for ``O`` in SO(4) only, so it is the extra
    commutant element separating SO(4) from O(4) at t=2.
    """
    if d != 4:
        raise ValidationError("the four-index epsilon operator needs d = 4")
    rows, cols, vals = [], [], []
    for perm in permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        a, b, c, e = perm
        rows.append(a * 4 + b)
        cols.append(c * 4 + e)
        vals.append((-1.0) ** inversions)
    return Operator(4, 2, sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(16, 16)))
