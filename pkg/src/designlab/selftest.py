"""Compact invariant suite behind the ``selftest`` subcommand."""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .brauer import composition_table_check, compose, double_factorial_odd, enumerate_pairings
from .circuits import BrickArchitecture, layer_moment_operator, spectral_gap
from .designs import lemma1_residuals, state_design_test
from .reps import algebra_rep
from .sampling import EnsembleSpec, symplectic_residual, unitarity_residual
from .shadows import channel_distance, third_moment_equality
from .weingarten import build_basis

TOL = 1e-10


@dataclass
class Check:
    name: str
    ok: bool
    value: float

    def as_dict(self):
        return {"name": self.name, "ok": self.ok, "value": self.value}


def _homomorphism_error(t, d):
    worst = 0.0
    diagrams = enumerate_pairings(t)
    for a, b in product(diagrams, repeat=2):
        c = compose(a, b)
        lhs = (algebra_rep(a, d) @ algebra_rep(b, d)).dense()
        rhs = (-d) ** c.loop_power * algebra_rep(c.diagram, d).dense()
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def _pinv_error(t, d):
    b = build_basis("symplectic", t, d)
    g, w = b.gram, b.gram_pinv
    return float(max(np.linalg.norm(g @ w @ g - g), np.linalg.norm(w @ g @ w - w)))


def run_checks():
    checks = []

    def add(name, value, ok=None):
        checks.append(Check(name, bool(value <= TOL) if ok is None else bool(ok), float(value)))

    for t in range(1, 7):
        n = len(enumerate_pairings(t))
        add(f"pairing count t={t}", abs(n - double_factorial_odd(t)))
    add("composition table t=3", 0.0, bool(composition_table_check(3)))
    add("Brauer homomorphism t=2 d=4", _homomorphism_error(2, 4))
    add("Gram pseudo-inverse t=3 d=4", _pinv_error(3, 4))
    u = EnsembleSpec("sp", 6, seed=7).sample()
    add("symplectic sample residual d=6", max(symplectic_residual(u), unitarity_residual(u)))
    for d, t in ((4, 2), (4, 3)):
        add(f"symplectic state design d={d} t={t}", state_design_test("sp", t, d).distance)
    psi = np.zeros(4)
    psi[0] = 1
    lemma = lemma1_residuals(2, 4, psi)
    add("annihilation t=2 d=4", max(r.max_residual() for r in lemma.values() if not r.permutation))
    add("shadow channels d=4", channel_distance(4))
    add("shadow third moments d=2", third_moment_equality(2))
    add("single-gate gap", spectral_gap(layer_moment_operator(BrickArchitecture.single_gate("SP(2)"))).value)
    return checks
