"""State-design verdicts: annihilation residuals, design distances, mixed-state gap."""
from dataclasses import dataclass, field
import math

import numpy as np

from .brauer import enumerate_pairings, is_permutation
from .errors import DomainError, NormalizationError, ParityError, ValidationError
from .reps import brauer_rep, rising_factorial, sym_projector
from .sampling import EnsembleSpec, Family
from .weingarten import build_basis, closed_form_twirl2, mc_twirl, twirl

EXACT_TOL = 1e-10


def _state(psi, d):
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape != (d,):
        raise ValidationError(f"state of length {psi.size} does not live in C^{d}")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise NormalizationError("reference state must be normalized")
    return psi


def tensor_power(psi, t):
    out = np.ones(1, dtype=complex)
    for _ in range(t):
        out = np.kron(out, psi)
    return out


def pure_moment_input(psi, t):
    """``|psi><psi|^{(x)t}`` as a dense matrix."""
    v = tensor_power(psi, t)
    return np.outer(v, v.conj())


@dataclass
class Lemma1Residual:
    """Frobenius norms of ``F(s) rho``, ``rho F(s)``, ``F(s) Pi``, ``Pi F(s)``."""

    permutation: bool
    state_left: float
    state_right: float
    sym_left: float
    sym_right: float

    def max_residual(self):
        return max(self.state_left, self.state_right, self.sym_left, self.sym_right)


def lemma1_residuals(t, d, psi):
    """Residuals of every Brauer operator against ``|psi><psi|^t`` and ``Pi_sym``.

    Non-permutation diagrams should give zeros; permutation diagrams are
    returned as a nonzero control.
    """
    if d % 2:
        raise ParityError("symplectic Brauer operators need even d")
    psi = _state(psi, d)
    v = tensor_power(psi, t)
    pi_sym = sym_projector(t, d).dense()
    out = {}
    for sigma in enumerate_pairings(t):
        f = brauer_rep(sigma, d).sparse()
        # rank one: |F vv^dag|_F = |F v|
        left = np.linalg.norm(f @ v)
        right = np.linalg.norm(f.conj().T @ v)
        out[sigma] = Lemma1Residual(
            is_permutation(sigma),
            float(left),
            float(right),
            float(np.linalg.norm(f @ pi_sym)),
            float(np.linalg.norm((f.T @ pi_sym.T).T)),  # Pi F
        )
    return out


@dataclass
class DesignReport:
    family: str
    t: int
    d: int
    mode: str
    distance: float
    tolerance: float
    samples: int = 0
    verdict: bool = field(init=False)

    def __post_init__(self):
        self.verdict = bool(self.distance <= self.tolerance)


def default_mc_tolerance(t, n):
    return (5.0 if t <= 2 else 10.0) / math.sqrt(n)


def state_design_test(family, t, d, mode="exact", n=None, psi=None, seed=0, stream_id=0,
                      workers=1, tolerance=None):
    """Distance between the ``family`` moment of ``|psi><psi|^t`` and ``Pi_sym``.

    ``psi`` defaults to ``|0>``.
    """
    family = Family.parse(family)
    if psi is None:
        psi = np.zeros(d)
        psi[0] = 1
    psi = _state(psi, d)
    x = pure_moment_input(psi, t)
    target = sym_projector(t, d).dense()
    if mode == "exact":
        moment = twirl(x, build_basis(family, t, d)).operator.dense()
        tol = EXACT_TOL if tolerance is None else tolerance
        samples = 0
    elif mode == "monte_carlo":
        if not n:
            raise ValidationError("monte_carlo mode needs a sample count")
        spec = EnsembleSpec(family, d, seed, stream_id)
        moment = mc_twirl(x, spec, t, n, workers=workers).dense()
        tol = default_mc_tolerance(t, n) if tolerance is None else tolerance
        samples = n
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return DesignReport(family.value, t, d, mode, float(np.linalg.norm(moment - target)), tol, samples)


def permutation_coefficients(t, d, psi=None):
    """Symplectic twirl coefficients of ``|psi><psi|^t``, split (permutations, rest).

    Both blocks follow from the pure-state structure: every permutation gets
    ``1 / (d (d+1) ... (d+t-1))`` and the rest vanish.
    """
    if psi is None:
        psi = np.zeros(d)
        psi[0] = 1
    basis = build_basis(Family.SYMPLECTIC, t, d)
    res = twirl(pure_moment_input(_state(psi, d), t), basis)
    k = math.factorial(t)
    return res.coefficients[:k], res.coefficients[k:]


def annihilation_route(t, d, psi=None):
    """Twirl of ``|psi><psi|^t`` rebuilt as ``(sum c_pi) Pi_sym``.

    Projecting the symplectic expansion onto the symmetric subspace kills
    every non-permutation term and maps each permutation to the projector.
    """
    c_perm, _ = permutation_coefficients(t, d, psi)
    sym = sym_projector(t, d).dense()
    # the unnormalized projector is D_t / t! times the trace-one one
    return np.sum(c_perm) * rising_factorial(d, t) / math.factorial(t) * sym


# -- mixed states ------------------------------------------------------------


EMBEDDINGS = ("basis", "extremal", "conjugate")


def rank_two_state(lam0, d, embedding="basis"):
    """``lam0 |a><a| + (1 - lam0) |b><b|`` for two orthonormal basis vectors.

    ``basis``: ``a, b = e_0, e_1``; ``extremal``: ``e_0, e_{d-1}`` (all-zeros and
    all-ones for qubits); ``conjugate``: ``e_0, e_{d/2}`` which are paired by
    the symplectic form.
    """
    if not 0 <= lam0 <= 1:
        raise DomainError("lam0 must lie in [0, 1]")
    second = {"basis": 1, "extremal": d - 1, "conjugate": d // 2}.get(embedding)
    if second is None:
        raise ValidationError(f"unknown embedding {embedding!r}")
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = lam0
    rho[second, second] = 1 - lam0
    return rho


def simplified_rank_two_coefficients(lam0, d):
    """t=2 twirl coefficients written through the spectrum only.

    Unitary on ``(I, SWAP)`` and symplectic on ``(I, SWAP, Phi_s)``.  The
    symplectic form assumes ``Tr[rho^2 Phi_s] = -2 lam0 lam1``, i.e. the two
    eigenvectors are paired by the symplectic form.
    """
    lam1 = 1 - lam0
    purity = lam0**2 + lam1**2
    cross = 2 * lam0 * lam1
    norm_u = d * d - 1
    unitary = np.array([(1 - purity / d) / norm_u, (purity - 1 / d) / norm_u])
    norm = d * (d + 1) * (d - 2)
    symplectic = np.array([
        1 / (d * (d + 1)),
        (-1 + (d - 1) * purity + cross) / norm,
        (1 - purity - (d - 1) * cross) / norm,
    ])
    return unitary, symplectic


@dataclass
class MixedGapReport:
    lam0: float
    lam1: float
    d: int
    embedding: str
    twirl_u: object
    twirl_sp: object
    gap: float
    closed_form_applicable: bool
    closed_form_error_u: float = None
    closed_form_error_sp: float = None
    simplified_applicable: bool = False
    simplified_error: float = None


def mixed_state_gap(lam0, d, embedding="basis"):
    """Compare unitary and symplectic t=2 twirls of a rank-two ``rho^(x)2``."""
    if d < 2 or d % 2:
        raise ParityError("mixed-state gap needs even d >= 2")
    rho = rank_two_state(lam0, d, embedding)
    x = np.kron(rho, rho)
    tw_u = twirl(x, build_basis(Family.UNITARY, 2, d))
    tw_sp = twirl(x, build_basis(Family.SYMPLECTIC, 2, d))
    op_u = tw_u.operator.dense()
    op_sp = tw_sp.operator.dense()
    report = MixedGapReport(
        float(lam0), float(1 - lam0), d, embedding, tw_u, tw_sp,
        float(np.linalg.norm(op_u - op_sp)), closed_form_applicable=d >= 4,
    )
    if d >= 4:
        cu = closed_form_twirl2(x, Family.UNITARY, d)
        csp = closed_form_twirl2(x, Family.SYMPLECTIC, d)
        report.closed_form_error_u = float(
            np.linalg.norm(tw_u.basis.combine(cu) - op_u))
        report.closed_form_error_sp = float(
            np.linalg.norm(tw_sp.basis.combine(csp) - op_sp))
        if embedding == "conjugate":
            su, ssp = simplified_rank_two_coefficients(lam0, d)
            report.simplified_applicable = True
            report.simplified_error = float(max(
                np.linalg.norm(tw_u.basis.combine(su) - op_u),
                np.linalg.norm(tw_sp.basis.combine(ssp) - op_sp),
            ))
    return report
