"""Global classical shadows with Haar-unitary or Haar-symplectic rotations.

The evaluated channel for both ensembles is ``M(rho) = (rho + Tr[rho] I) / (d+1)``,
so one snapshot is ``(d+1) U^dag |w><w| U - I`` and the single-shot estimate
of ``Tr[rho O]`` is ``(d+1) <w|U O U^dag|w> - Tr[O]``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import DimensionError, ValidationError
from .operator import Operator
from .sampling import SAMPLERS, EnsembleSpec, Family, iter_blocks
from .weingarten import build_basis, twirl

SELF_TEST_TOL = 1e-10
DEFAULT_BLOCK = 4096


@dataclass(frozen=True)
class ShadowProtocol:
    ensemble: EnsembleSpec
    n_samples: int = 1000

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValidationError("n_samples must be positive")

    @property
    def d(self):
        return self.ensemble.d

    @property
    def family(self):
        return self.ensemble.family

    @property
    def basis(self):
        """Computational-basis projectors ``Pi_w``."""
        eye = np.eye(self.d)
        return [np.outer(eye[w], eye[w]) for w in range(self.d)]


@dataclass
class ShadowRecord:
    unitary_index: int
    outcome: int
    snapshot: Operator


def _protocol(p, d=None):
    if isinstance(p, ShadowProtocol):
        return p
    if isinstance(p, EnsembleSpec):
        return ShadowProtocol(p)
    if d is None:
        raise ValidationError("a bare family needs a dimension")
    return ShadowProtocol(EnsembleSpec(Family.parse(p), d))


def _square(a, d, what):
    a = a.dense() if isinstance(a, Operator) else np.asarray(a, dtype=complex)
    if a.shape != (d, d):
        raise DimensionError(f"{what} of shape {a.shape} does not act on C^{d}")
    return a


@lru_cache(maxsize=None)
def basis_moment(family, t, d):
    """Exact twirl of ``sum_w Pi_w^{(x)t}`` as a dense ``d^t x d^t`` array."""
    dim = d**t
    x = np.zeros((dim, dim))
    stride = sum(d**k for k in range(t))
    idx = np.arange(d) * stride
    x[idx, idx] = 1
    out = twirl(x, build_basis(Family.parse(family), t, d)).operator.dense()
    out.setflags(write=False)
    return out


def measurement_channel(protocol, rho, d=None):
    """``M(rho) = Tr_1[(rho (x) I) T_2]`` with ``T_2`` the twirled basis moment."""
    p = _protocol(protocol, d)
    rho = _square(rho, p.d, "state")
    t2 = basis_moment(p.family, 2, p.d)
    # Tr_1[(rho (x) I) T] = sum_ij rho_ji T[i., j.]
    blocks = t2.reshape(p.d, p.d, p.d, p.d)
    return Operator(p.d, 1, np.einsum("ji,iajb->ab", rho, blocks))


def closed_form_channel(rho):
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return (rho + np.trace(rho) * np.eye(d)) / (d + 1)


def invert_channel(a, d):
    """``M^{-1}(A) = (d+1) A - Tr[A] I``."""
    a = _square(a, d, "operator")
    return Operator(d, 1, (d + 1) * a - np.trace(a) * np.eye(d))


def channel_superoperator(protocol, d=None):
    """``d^2 x d^2`` matrix of ``M`` acting on row-major ``vec(rho)``."""
    p = _protocol(protocol, d)
    n = p.d
    cols = []
    for k in range(n * n):
        e = np.zeros(n * n, dtype=complex)
        e[k] = 1
        cols.append(measurement_channel(p, e.reshape(n, n)).dense().ravel())
    return np.stack(cols, axis=1)


def channel_distance(d):
    """Frobenius distance between the unitary and symplectic channel superoperators."""
    a = channel_superoperator(Family.UNITARY, d)
    b = channel_superoperator(Family.SYMPLECTIC, d)
    return float(np.linalg.norm(a - b))


@lru_cache(maxsize=None)
def self_test_inverse(family, d):
    """Check the closed-form channel and inverse against the Weingarten channel.

    Runs once per ``(family, d)``; raises :class:`ValidationError` on mismatch.
    """
    sup = channel_superoperator(family, d)
    closed = np.zeros_like(sup)
    inv = np.zeros_like(sup)
    for k in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[k] = 1
        e = e.reshape(d, d)
        closed[:, k] = closed_form_channel(e).ravel()
        inv[:, k] = invert_channel(e, d).dense().ravel()
    err = max(np.linalg.norm(sup - closed), np.linalg.norm(sup @ inv - np.eye(d * d)))
    if err > SELF_TEST_TOL:
        raise ValidationError(f"closed-form channel inverse failed its self-test ({err:.3g})")
    return float(err)


# -- acquisition ---------------------------------------------------------------


def _born_outcomes(us, rho, rng):
    probs = np.einsum("nwi,ij,nwj->nw", us, rho, us.conj()).real
    probs = np.clip(probs, 0, None)
    cum = np.cumsum(probs, axis=1)
    u = rng.random(len(us)) * cum[:, -1]
    w = (cum < u[:, None]).sum(axis=1)
    return np.minimum(w, us.shape[1] - 1)


def _block(spec, rho, b, count):
    rng = spec.generator(b)
    us = SAMPLERS[spec.family](spec.d, size=count, rng=rng)
    return us, _born_outcomes(us, rho, rng)


def _map_blocks(protocol, rho, n, fn, workers, block_size):
    spec = protocol.ensemble
    blocks = list(iter_blocks(n, block_size))

    def run(item):
        b, count = item
        us, ws = _block(spec, rho, b, count)
        return fn(us, ws)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, blocks))
    return [run(item) for item in blocks]


def sample_shadows(protocol, rho, n=None, workers=1, block_size=DEFAULT_BLOCK):
    """Draw ``n`` :class:`ShadowRecord` objects, in stream order."""
    p = _protocol(protocol)
    d = p.d
    rho = _square(rho, d, "state")
    self_test_inverse(p.family, d)
    n = p.n_samples if n is None else n

    def build(us, ws):
        rows = us[np.arange(len(us)), ws]  # <w|U
        proj = np.einsum("ni,nj->nij", rows.conj(), rows)  # U^dag|w><w|U
        return ws, (d + 1) * proj - np.eye(d)

    out = []
    k = 0
    for ws, snaps in _map_blocks(p, rho, n, build, workers, block_size):
        for w, s in zip(ws, snaps):
            out.append(ShadowRecord(k, int(w), Operator(d, 1, s)))
            k += 1
    return out


def single_shot_estimates(protocol, rho, obs, n=None, workers=1, block_size=DEFAULT_BLOCK):
    """``Tr[rho_hat O]`` for ``n`` shadows without materializing snapshots."""
    p = _protocol(protocol)
    d = p.d
    rho = _square(rho, d, "state")
    obs = _square(obs, d, "observable")
    self_test_inverse(p.family, d)
    n = p.n_samples if n is None else n
    tr = np.trace(obs).real

    def est(us, ws):
        rows = us[np.arange(len(us)), ws]
        return (d + 1) * np.einsum("ni,ij,nj->n", rows, obs, rows.conj()).real - tr

    return np.concatenate(_map_blocks(p, rho, n, est, workers, block_size))


@dataclass
class ShadowEstimate:
    mean: float
    variance: float
    stderr: float
    variance_stderr: float
    exact_mean: float
    exact_variance: float
    n: int


def exact_moments(family, rho, obs):
    """``(E[o], Var[o])`` from the t=2 and t=3 basis moments.

    With ``O~ = M^{-1}(O)``: ``E[o] = Tr[(rho (x) O~) T_2]`` and
    ``E[o^2] = Tr[(rho (x) O~ (x) O~) T_3]``.
    """
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    ot = invert_channel(obs, d).dense()
    t2 = basis_moment(Family.parse(family), 2, d)
    t3 = basis_moment(Family.parse(family), 3, d)
    mean = np.trace(np.kron(rho, ot) @ t2).real
    second = np.trace(np.kron(np.kron(rho, ot), ot) @ t3).real
    return float(mean), float(second - mean**2)


def exact_variance(family, rho, obs):
    return exact_moments(family, rho, obs)[1]


def estimate_observable(protocol, rho, obs, n=None, workers=1, block_size=DEFAULT_BLOCK):
    """Shadow estimate of ``Tr[rho O]`` with its empirical and exact variance."""
    p = _protocol(protocol)
    n = p.n_samples if n is None else n
    if n < 100:
        raise ValidationError("need at least 100 shadows for an estimate")
    obs = _square(obs, p.d, "observable")
    if np.linalg.norm(obs - obs.conj().T) > 1e-10:
        raise ValidationError("observable must be Hermitian")
    vals = single_shot_estimates(p, rho, obs, n, workers, block_size)
    mean = float(vals.mean())
    var = float(vals.var(ddof=1))
    m4 = float(np.mean((vals - mean) ** 4))
    var_se = math.sqrt(max(m4 - var**2, 0.0) / n)
    em, ev = exact_moments(p.family, _square(rho, p.d, "state"), obs)
    return ShadowEstimate(mean, var, math.sqrt(var / n), var_se, em, ev, n)


def third_moment_equality(d):
    """Frobenius distance between unitary and symplectic t=3 basis moments."""
    a = basis_moment(Family.UNITARY, 3, d)
    b = basis_moment(Family.SYMPLECTIC, 3, d)
    return float(np.linalg.norm(a - b))
