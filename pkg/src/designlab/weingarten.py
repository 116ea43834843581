"""Exact group twirls through a commutant basis and its Gram pseudo-inverse.

For a basis ``{P_mu}`` of the t-th commutant the twirl of ``X`` is
``sum_nu c_nu P_nu`` with ``c = pinv(G) b``, ``G_{mu nu} = Tr[P_mu^dag P_nu]``
and ``b_mu = Tr[P_mu^dag X]``.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
import math

import numpy as np
import scipy.sparse as sp

from . import config
from .brauer import Pairing, enumerate_pairings
from .errors import CapabilityError, DimensionError, ValidationError
from .operator import Operator
from .reps import brauer_rep, levi_civita_operator, orthogonal_brauer_rep, perm_rep
from .sampling import EnsembleSpec, Family, block_reduce

PINV_RCOND = 1e-10


@dataclass(frozen=True, eq=False)
class CommutantBasis:
    family: Family
    t: int
    d: int
    labels: tuple
    diagrams: tuple
    operators: tuple
    gram: np.ndarray
    gram_pinv: np.ndarray
    rank: int
    traces: np.ndarray = field(repr=False)
    vectors: sp.csr_matrix = field(repr=False)

    @property
    def size(self):
        return len(self.operators)

    @property
    def n_permutations(self):
        return math.factorial(self.t) if self.family is not Family.ORTHOGONAL else 0

    def overlaps(self, x):
        """``b_mu = Tr[P_mu^dag X]`` for every basis element."""
        x = _as_matrix(x, self.d, self.t)
        if sp.issparse(x):
            flat = sp.csr_matrix(x.reshape(1, -1))
            return np.asarray((self.vectors.conj() @ flat.T).toarray()).ravel()
        return self.vectors.conj() @ np.asarray(x).ravel()

    def combine(self, coefficients):
        """Dense ``sum_nu c_nu P_nu``."""
        dim = self.d**self.t
        flat = self.vectors.T @ np.asarray(coefficients, dtype=complex)
        return np.asarray(flat).reshape(dim, dim)


@dataclass(frozen=True, eq=False)
class TwirlResult:
    coefficients: np.ndarray
    basis: CommutantBasis
    trace_in: complex = 0j

    @property
    def operator(self):
        return Operator(self.basis.d, self.basis.t, self.basis.combine(self.coefficients))

    @property
    def trace_out(self):
        return complex(np.dot(self.coefficients, self.basis.traces))


def _as_matrix(x, d, t):
    dim = d**t
    m = x.matrix() if isinstance(x, Operator) else x
    if m.shape != (dim, dim):
        raise DimensionError(f"operator of shape {m.shape} does not act on ({d})^{t}")
    return m


def _orthogonal_basis(t, d):
    if t > 2:
        raise CapabilityError("orthogonal commutant supported for t <= 2 only")
    if d < 3:
        raise CapabilityError("orthogonal commutant needs d >= 3 (SO(2) is abelian)")
    diagrams = list(enumerate_pairings(t))
    ops = [orthogonal_brauer_rep(s, d) for s in diagrams]
    labels = [str(s) for s in diagrams]
    if t == 2 and d == 4:
        ops.append(levi_civita_operator(4))
        labels.append("epsilon")
        diagrams.append(None)
    return diagrams, labels, ops


@lru_cache(maxsize=64)
def build_basis(family, t, d):
    """Commutant basis of the t-fold action of ``family`` in dimension ``d``.

    * unitary: the ``t!`` permutation operators (identity first);
    * symplectic: all ``(2t-1)!!`` Brauer operators, permutations first;
    * orthogonal (SO(d), ``t <= 2``): Brauer operators with plain cups, plus
      the epsilon operator when ``d == 4``.
    """
    family = Family.parse(family)
    config.check_dim(d, t)
    if family is Family.UNITARY:
        perms = list(permutations(range(t)))
        diagrams = [Pairing.from_permutation(p) for p in perms]
        ops = [perm_rep(p, d) for p in perms]
        labels = [str(s) for s in diagrams]
    elif family is Family.SYMPLECTIC:
        diagrams = enumerate_pairings(t)
        ops = [brauer_rep(s, d) for s in diagrams]
        labels = [str(s) for s in diagrams]
    else:
        diagrams, labels, ops = _orthogonal_basis(t, d)

    vectors = sp.vstack([sp.csr_matrix(op.sparse().reshape(1, -1)) for op in ops]).tocsr()
    gram = np.asarray((vectors.conj() @ vectors.T).toarray())
    if np.max(np.abs(gram.imag)) > 1e-12:
        raise ValidationError("commutant Gram matrix is not real")
    gram = gram.real
    gram_pinv = np.linalg.pinv(gram, rcond=PINV_RCOND, hermitian=True)
    sv = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(sv > PINV_RCOND * sv[0]))
    gram.setflags(write=False)
    gram_pinv.setflags(write=False)
    traces = np.array([op.trace() for op in ops])
    traces.setflags(write=False)
    return CommutantBasis(
        family, t, d, tuple(labels), tuple(diagrams), tuple(ops), gram, gram_pinv, rank,
        traces, vectors,
    )


def twirl(x, basis):
    """Exact twirl ``E_G[U^t X U^dag t]`` expanded in ``basis``."""
    m = _as_matrix(x, basis.d, basis.t)
    b = basis.overlaps(m)
    c = basis.gram_pinv @ b
    return TwirlResult(c, basis, complex(m.diagonal().sum()))


def twirl_operator(x, family, t, d):
    return twirl(x, build_basis(family, t, d)).operator


def _conjugate_batch(x, us, t):
    """``sum_k U_k^{(x)t} X U_k^{dag (x)t}`` for a stack of unitaries."""
    d = us.shape[-1]
    n = us.shape[0]
    y = np.broadcast_to(x.reshape((d,) * (2 * t)), (n,) + (d,) * (2 * t)).astype(complex)
    letters = "abcdefghijklmnop"
    for axis in range(2 * t):
        idx = list(letters[: 2 * t])
        src = idx[axis]
        idx_out = idx.copy()
        idx_out[axis] = "z"
        mat = us if axis < t else us.conj()
        y = np.einsum(f"yz{src},y{''.join(idx)}->y{''.join(idx_out)}", mat, y)
    return y.sum(axis=0).reshape(d**t, d**t)


def mc_twirl(x, spec, t, n, workers=1, block_size=None, unitaries=None):
    """Empirical mean of ``U^t X U^dag t`` over ``n`` Haar samples.

    ``unitaries`` bypasses the sampler (used to pin the samples in tests).
    """
    if n < 1:
        raise ValidationError("need at least one sample")
    d = spec.d
    config.check_dim(d, t)
    m = _as_matrix(x, d, t)
    m = m.toarray() if sp.issparse(m) else np.asarray(m)
    if unitaries is not None:
        us = np.asarray(unitaries)[:n]
        return Operator(d, t, _conjugate_batch(m, us, t) / len(us))
    if block_size is None:
        block_size = max(1, min(4096, 2**22 // d ** (2 * t)))
    total = block_reduce(spec, n, block_size, lambda us: _conjugate_batch(m, us, t), workers)
    return Operator(d, t, total / n)


# -- closed forms at t = 2 -------------------------------------------------


def closed_form_twirl2(x, family, d):
    """Coefficients of the t=2 twirl from the textbook formulas.

    Unitary: on ``(I, SWAP)``.  Symplectic: on ``(I, SWAP, Phi_s)`` with
    ``Phi_s`` the cup-cap Brauer operator; this needs ``d >= 4`` because of
    the ``(d - 2)`` denominator.
    """
    family = Family.parse(family)
    basis = build_basis(family, 2, d)
    m = _as_matrix(x, d, 2)
    b = basis.overlaps(m)
    tr, tr_swap = b[0], b[1]
    if family is Family.UNITARY:
        norm = d * d - 1
        return np.array([(tr - tr_swap / d) / norm, (tr_swap - tr / d) / norm])
    if family is Family.SYMPLECTIC:
        if d < 4:
            raise CapabilityError("symplectic closed form is singular at d = 2")
        tr_phi = b[2]
        norm = d * (d + 1) * (d - 2)
        return np.array([
            ((d - 1) * tr - tr_swap + tr_phi) / norm,
            (-tr + (d - 1) * tr_swap - tr_phi) / norm,
            (tr - tr_swap + (d - 1) * tr_phi) / norm,
        ])
    raise CapabilityError("no closed form for the orthogonal family")
