"""Haar samplers for U(d), SP(d/2) and SO(d) with reproducible streams.

Random numbers come from numpy's counter-based Philox generator keyed by
``(seed, stream_id, block)``, so any block of samples can be regenerated
independently of how work is split between threads.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParityError, ValidationError
from .reps import omega


class Family(str, Enum):
    UNITARY = "unitary"
    SYMPLECTIC = "symplectic"
    ORTHOGONAL = "orthogonal"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"u": "unitary", "sp": "symplectic", "o": "orthogonal", "so": "orthogonal"}
        value = str(value).lower()
        try:
            return cls(aliases.get(value, value))
        except ValueError as exc:
            raise ValidationError(f"unknown group family {value!r}") from exc


@dataclass(frozen=True)
class EnsembleSpec:
    family: Family
    d: int
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if self.d < 1:
            raise ValidationError("d must be positive")
        if self.family is Family.SYMPLECTIC and self.d % 2:
            raise ParityError(f"symplectic ensemble needs even d, got {self.d}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValidationError("stream_id must be non-negative")

    def generator(self, block=0):
        """Fresh generator for one block of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, block))
        return np.random.Generator(np.random.Philox(seq))

    def sample(self, size=None, block=0):
        """``size`` Haar samples from the start of ``block``."""
        return SAMPLERS[self.family](self.d, size=size, rng=self.generator(block))


def _ginibre(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _as_batch(size):
    return (1,) if size is None else (int(size),)


def haar_unitary(d, size=None, rng=None):
    """Complex Ginibre + QR with the phases of ``diag(R)`` divided out."""
    rng = np.random.default_rng(rng)
    z = _ginibre(rng, _as_batch(size) + (d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[..., None, :]
    return q[0] if size is None else q


def haar_symplectic(d, size=None, rng=None):
    """Haar sample of the unitary symplectic group SP(d/2).

    Column ``j`` (``j < d/2``) is a Gaussian vector orthonormalized against all
    earlier columns; its partner ``j + d/2`` is ``-Omega conj(column j)``.
    This is quaternionic Gram-Schmidt on a quaternionic Ginibre matrix, and
    the result satisfies ``U^T Omega U = Omega`` by construction.
    """
    if d % 2:
        raise ParityError(f"symplectic sampling needs even d, got {d}")
    rng = np.random.default_rng(rng)
    h = d // 2
    om = omega(d)
    batch = _as_batch(size)
    z = _ginibre(rng, batch + (d, h))
    u = np.zeros(batch + (d, d), dtype=complex)
    for j in range(h):
        v = z[..., j]
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            if j:
                done = np.concatenate([u[..., :j], u[..., h:h + j]], axis=-1)
                v = v - np.einsum("...ij,...j->...i", done, np.einsum("...ij,...i->...j", done.conj(), v))
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
        u[..., j] = v
        u[..., h + j] = -np.einsum("ij,...j->...i", om, v.conj())
    return u[0] if size is None else u


def haar_orthogonal(d, size=None, rng=None):
    """Haar sample of SO(d): real Ginibre + QR, sign fix, then det fix."""
    rng = np.random.default_rng(rng)
    z = rng.standard_normal(_as_batch(size) + (d, d))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[..., None, :]
    flip = np.linalg.det(q) < 0
    q[flip, :, 0] *= -1
    return q[0] if size is None else q


SAMPLERS = {
    Family.UNITARY: haar_unitary,
    Family.SYMPLECTIC: haar_symplectic,
    Family.ORTHOGONAL: haar_orthogonal,
}


def iter_blocks(n, block_size):
    """``(block_index, count)`` pairs covering ``n`` samples."""
    for b, start in enumerate(range(0, n, block_size)):
        yield b, min(block_size, n - start)


def block_reduce(spec, n, block_size, fn, workers=1):
    """Sum ``fn(samples)`` over blocks of ``spec``'s stream in block order.

    Block ``b`` always draws from generator ``(seed, stream_id, b)`` so the
    total is independent of ``workers``.
    """
    blocks = list(iter_blocks(n, block_size))

    def run(item):
        b, count = item
        return fn(spec.sample(count, block=b))

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(item) for item in blocks]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


def symplectic_residual(u):
    om = omega(u.shape[-1])
    return float(np.linalg.norm(u.T @ om @ u - om))


def unitarity_residual(u):
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[-1])))
