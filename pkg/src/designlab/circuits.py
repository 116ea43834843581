"""Second-moment operators of 1-D brickwork circuits and their spectral gaps.

A vector here is an operator ``X`` on two copies of ``n`` qubits, reshaped to
``4n`` binary axes ordered (ket copy 1, ket copy 2, bra copy 1, bra copy 2),
qubit 1 most significant.  The moment operator of a layer acts as the layer
twirl ``X -> E[U^{(x)2} X U^{dag (x)2}]``, which is the vectorization of
``E[U^{(x)2} (x) conj(U)^{(x)2}]``.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import CapabilityError, ConvergenceError, DomainError, ValidationError
from .sampling import Family, SAMPLERS
from .weingarten import build_basis

PARAMS_PER_GATE = {"SU(4)": 15, "SO(4)": 6, "SP(2)": 10}
GATE_FAMILY = {"SU(4)": Family.UNITARY, "SO(4)": Family.ORTHOGONAL, "SP(2)": Family.SYMPLECTIC}
MAX_QUBITS = 6


def brick_pairs(n):
    """Gates of one layer as ``(half, (q, q+1))`` with 0-based qubits.

    ``half = "odd"`` holds pairs (1,2), (3,4), ...; ``half = "even"`` holds
    (2,3), (4,5), ... (1-based), giving ``n - 1`` gates in total.
    """
    odd = [("odd", (q, q + 1)) for q in range(0, n - 1, 2)]
    even = [("even", (q, q + 1)) for q in range(1, n - 1, 2)]
    return odd + even


@dataclass
class BrickArchitecture:
    n_qubits: int
    gate_assignment: dict
    layers: int = 1
    params_per_gate: dict = field(default_factory=lambda: dict(PARAMS_PER_GATE))

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValidationError("brickwork needs at least two qubits")
        expected = {pair for _, pair in brick_pairs(self.n_qubits)}
        missing = expected - set(self.gate_assignment)
        if missing:
            raise ValidationError(f"unassigned qubit pairs: {sorted(missing)}")
        for group in self.gate_assignment.values():
            if group not in GATE_FAMILY:
                raise ValidationError(f"unknown local group {group!r}")

    @classmethod
    def unitary(cls, n):
        return cls(n, {pair: "SU(4)" for _, pair in brick_pairs(n)})

    @classmethod
    def symplectic(cls, n):
        """SP(2) on every gate touching qubit 1, SO(4) on the rest."""
        return cls(n, {pair: "SP(2)" if 0 in pair else "SO(4)" for _, pair in brick_pairs(n)})

    @classmethod
    def single_gate(cls, group="SU(4)"):
        return cls(2, {(0, 1): group})

    @property
    def global_family(self):
        groups = set(self.gate_assignment.values())
        if groups == {"SU(4)"}:
            return Family.UNITARY
        if "SP(2)" in groups and groups <= {"SP(2)", "SO(4)"} and self.gate_assignment.get((0, 1)) == "SP(2)":
            return Family.SYMPLECTIC
        if groups == {"SO(4)"}:
            return Family.ORTHOGONAL
        raise CapabilityError("no known global group for this gate assignment")

    def parameters_per_layer(self):
        return sum(self.params_per_gate[g] for g in self.gate_assignment.values())


class LocalTwirl:
    """Projector onto the two-copy commutant of a local group on two qubits."""

    def __init__(self, group):
        basis = build_basis(GATE_FAMILY[group], 2, 4)
        self.group = group
        vectors = basis.vectors.toarray()
        if np.max(np.abs(vectors.imag)) > 0:
            raise ValidationError("local commutant basis is expected to be real")
        self.vectors = vectors.real
        self.weingarten = np.asarray(basis.gram_pinv)
        self.rank = basis.rank

    def matrix(self):
        return self.vectors.T @ self.weingarten @ self.vectors

    def apply_flat(self, block):
        """Act on a ``(256, m)`` block of local coordinates."""
        return self.vectors.T @ (self.weingarten @ (self.vectors @ block))


class MomentOperator:
    """Matrix-free single-layer moment operator ``T = P_odd P_even``."""

    def __init__(self, arch):
        n = arch.n_qubits
        if n > MAX_QUBITS:
            raise DomainError(f"n_qubits={n} exceeds the supported {MAX_QUBITS}")
        self.arch = arch
        self.n_qubits = n
        self.dim = 2 ** (4 * n)
        cache = {}
        self.gates = []
        for half, pair in brick_pairs(n):
            group = arch.gate_assignment[pair]
            if group not in cache:
                cache[group] = LocalTwirl(group)
            self.gates.append((half, pair, cache[group]))

    def _local_axes(self, pair):
        n = self.n_qubits
        q = pair[0]
        return [c * n + q + k for c in range(4) for k in range(2)]

    def _apply_gate(self, x, pair, twirl):
        axes = self._local_axes(pair)
        front = np.moveaxis(x, axes, range(8))
        shape = front.shape
        out = twirl.apply_flat(front.reshape(256, -1)).reshape(shape)
        return np.moveaxis(out, range(8), axes)

    def _apply_half(self, x, half):
        for h, pair, twirl in self.gates:
            if h == half:
                x = self._apply_gate(x, pair, twirl)
        return x

    def _tensor(self, v):
        return np.asarray(v).reshape((2,) * (4 * self.n_qubits))

    def apply(self, v):
        """``T v``: even-half gates act first, then odd-half."""
        x = self._apply_half(self._tensor(v), "even")
        return self._apply_half(x, "odd").reshape(np.shape(v))

    def apply_adjoint(self, v):
        x = self._apply_half(self._tensor(v), "odd")
        return self._apply_half(x, "even").reshape(np.shape(v))

    def apply_symmetric(self, v):
        """``P_even P_odd P_even v``; same nonzero spectrum as ``T``."""
        x = self._apply_half(self._tensor(v), "even")
        x = self._apply_half(x, "odd")
        return self._apply_half(x, "even").reshape(np.shape(v))

    def dense(self):
        if self.n_qubits > 3:
            raise DomainError("dense moment operator only materialized for n <= 3")
        eye = np.eye(self.dim)
        return np.stack([self.apply(eye[:, k]) for k in range(self.dim)], axis=1)

    def fixed_basis(self):
        """Orthonormal vectorized global t=2 commutant (the eigenvalue-1 space)."""
        basis = build_basis(self.arch.global_family, 2, 2**self.n_qubits)
        vecs = basis.vectors.toarray().real.T
        q, r = np.linalg.qr(vecs)
        keep = np.abs(np.diagonal(r)) > 1e-10 * np.max(np.abs(np.diagonal(r)))
        return q[:, keep]


def layer_moment_operator(arch):
    return MomentOperator(arch)


@dataclass
class GapResult:
    value: float
    iterations: int
    residual: float


def _deflate(v, fixed):
    return v - fixed @ (fixed.T @ v)


def power_iteration(apply, dim, rng, deflate=None, tol=1e-10, max_iters=5000, zero_tol=1e-12):
    """Largest eigenvalue of a symmetric PSD map by power iteration.

    Returns a :class:`GapResult`.  A map that annihilates the (deflated) start
    vector reports exactly zero.
    """
    v = rng.standard_normal(dim)
    if deflate is not None:
        v = deflate(v)
    v /= np.linalg.norm(v)
    value = 0.0
    residual = np.inf
    for it in range(1, max_iters + 1):
        w = apply(v)
        if deflate is not None:
            w = deflate(w)
        norm = np.linalg.norm(w)
        if norm <= zero_tol:
            return GapResult(0.0, it, float(norm))
        value = float(v @ w)
        residual = float(np.linalg.norm(w - value * v))
        if residual <= tol:
            return GapResult(value, it, residual)
        v = w / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iters} iterations", residual, max_iters
    )


def spectral_gap(moment, tol=1e-10, max_iters=5000, seed=0):
    """Largest eigenvalue of ``T`` strictly below one.

    The eigenvalue-1 space is the global commutant, projected out explicitly;
    the iteration runs on the symmetric form ``P_even P_odd P_even``.
    """
    fixed = moment.fixed_basis()
    rng = np.random.default_rng(seed)
    return power_iteration(
        moment.apply_symmetric, moment.dim, rng, lambda v: _deflate(v, fixed), tol, max_iters
    )


def spectrum_bounds(moment, tol=1e-10, seed=0):
    """``(lowest, highest)`` eigenvalue of the symmetric form, by Lanczos."""
    op = LinearOperator((moment.dim, moment.dim), matvec=moment.apply_symmetric, dtype=float)
    v0 = np.random.default_rng(seed).standard_normal(moment.dim)
    try:
        lo = eigsh(op, k=1, which="SA", tol=tol, v0=v0, return_eigenvectors=False)[0]
        hi = eigsh(op, k=1, which="LA", tol=tol, v0=v0, return_eigenvectors=False)[0]
    except ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos did not converge: {exc}") from exc
    return float(lo), float(hi)


def sample_layer(arch, rng):
    """One random layer unitary on ``n`` qubits (qubit 1 most significant)."""
    n = arch.n_qubits
    u = np.eye(2**n, dtype=complex)
    for half in ("even", "odd"):
        for h, pair in brick_pairs(n):
            if h != half:
                continue
            group = arch.gate_assignment[pair]
            gate = SAMPLERS[GATE_FAMILY[group]](4, rng=rng)
            full = np.kron(np.kron(np.eye(2 ** pair[0]), gate), np.eye(2 ** (n - pair[1] - 1)))
            u = full @ u
    return u


def parameter_ratio(lam_u, lam_sp, n_u, n_sp):
    """``N_SP / N_U = log(1/lam_u) / log(1/lam_sp) * n_sp / n_u``."""
    for lam in (lam_u, lam_sp):
        if not 0 < lam < 1:
            raise DomainError(f"spectral gap {lam} outside (0, 1)")
    if n_u <= 0 or n_sp <= 0:
        raise DomainError("parameter counts must be positive")
    return math.log(1 / lam_u) / math.log(1 / lam_sp) * n_sp / n_u


def design_depth(lam, eps, n):
    """Smallest ``L >= 0`` with ``lam**L <= eps / 2**n``."""
    if not 0 < lam < 1:
        raise DomainError(f"spectral gap {lam} outside (0, 1)")
    if not 0 < eps < 1:
        raise DomainError(f"epsilon {eps} outside (0, 1)")
    if n < 0:
        raise DomainError("n must be non-negative")
    target = eps / 2**n
    depth = max(0, math.ceil(math.log(target) / math.log(lam)))
    while depth > 0 and lam ** (depth - 1) <= target:
        depth -= 1
    while lam**depth > target:
        depth += 1
    return depth
