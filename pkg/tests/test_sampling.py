import numpy as np
import pytest

from designlab.errors import ParityError, ValidationError
from designlab.reps import omega
from designlab.sampling import (
    EnsembleSpec,
    Family,
    block_reduce,
    haar_orthogonal,
    haar_symplectic,
    haar_unitary,
    symplectic_residual,
    unitarity_residual,
)
from designlab.weingarten import build_basis, mc_twirl, twirl


@pytest.mark.parametrize("d", [1, 2, 5, 8])
def test_unitary_samples(d):
    for u in haar_unitary(d, size=10, rng=1):
        assert unitarity_residual(u) <= 1e-12


@pytest.mark.parametrize("d", [2, 4, 6, 10])
def test_symplectic_samples(d):
    om = omega(d)
    for u in haar_symplectic(d, size=10, rng=2):
        assert unitarity_residual(u) <= 1e-12
        assert symplectic_residual(u) <= 1e-12
        assert np.linalg.norm(u - om @ u.conj() @ om.T) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_orthogonal_samples(d):
    for o in haar_orthogonal(d, size=10, rng=3):
        assert np.isrealobj(o)
        assert np.linalg.norm(o.T @ o - np.eye(d)) <= 1e-12
        assert np.linalg.det(o) == pytest.approx(1)


def test_single_sample_shape():
    assert haar_unitary(3, rng=0).shape == (3, 3)
    assert haar_symplectic(4, size=2, rng=0).shape == (2, 4, 4)


def test_odd_symplectic():
    with pytest.raises(ParityError):
        haar_symplectic(3)
    with pytest.raises(ParityError):
        EnsembleSpec("sp", 5)


@pytest.mark.parametrize("kwargs", [{"d": 0}, {"d": 2, "seed": -1}, {"d": 2, "stream_id": -1}])
def test_spec_validation(kwargs):
    with pytest.raises(ValidationError):
        EnsembleSpec("unitary", **kwargs)


@pytest.mark.parametrize("alias, family", [("u", Family.UNITARY), ("SP", Family.SYMPLECTIC),
                                           ("so", Family.ORTHOGONAL), ("orthogonal", Family.ORTHOGONAL)])
def test_family_aliases(alias, family):
    assert Family.parse(alias) is family


def test_unknown_family():
    with pytest.raises(ValidationError):
        Family.parse("lorentz")


@pytest.mark.parametrize("family", list(Family))
def test_streams_are_deterministic(family):
    a = EnsembleSpec(family, 4, seed=123, stream_id=2).sample(5, block=3)
    b = EnsembleSpec(family, 4, seed=123, stream_id=2).sample(5, block=3)
    assert np.array_equal(a, b)
    c = EnsembleSpec(family, 4, seed=123, stream_id=3).sample(5, block=3)
    assert not np.array_equal(a, c)


def test_block_reduce_independent_of_workers():
    spec = EnsembleSpec("sp", 4, seed=9)
    one = block_reduce(spec, 1000, 64, lambda us: us.sum(axis=0), workers=1)
    four = block_reduce(spec, 1000, 64, lambda us: us.sum(axis=0), workers=4)
    assert np.array_equal(one, four)


@pytest.mark.parametrize("family, d", [("unitary", 4), ("symplectic", 4), ("orthogonal", 3)])
def test_first_moment(family, d):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((d, d))
    x = x + x.T
    n = 100_000
    got = mc_twirl(x, EnsembleSpec(family, d, seed=5), 1, n).dense()
    assert np.linalg.norm(got - np.trace(x) * np.eye(d) / d) <= 5 / np.sqrt(n)


def test_symplectic_second_moment_matches_weingarten():
    d, n = 4, 100_000
    rng = np.random.default_rng(1)
    x = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    x = (x + x.conj().T) / np.linalg.norm(x)
    exact = twirl(x, build_basis("symplectic", 2, d)).operator.dense()
    got = mc_twirl(x, EnsembleSpec("sp", d, seed=7), 2, n).dense()
    assert np.linalg.norm(got - exact) <= 5 / np.sqrt(n)


def test_symplectic_sampler_is_not_unitary_haar():
    # the t=2 moments differ on generic inputs, so the oracle above has teeth
    d = 4
    x = np.zeros((16, 16))
    x[1, 1] = 1
    u = twirl(x, build_basis("unitary", 2, d)).operator.dense()
    s = twirl(x, build_basis("symplectic", 2, d)).operator.dense()
    assert np.linalg.norm(u - s) > 0.01


def test_left_invariance():
    d, n = 4, 40_000
    v = haar_symplectic(d, rng=99)
    x = np.zeros((16, 16))
    x[1, 1] = 1
    spec = EnsembleSpec("sp", d, seed=11)
    plain = mc_twirl(x, spec, 2, n).dense()
    shifted_us = np.einsum("ij,njk->nik", v, spec.sample(n))
    shifted = mc_twirl(x, spec, 2, n, unitaries=shifted_us).dense()
    assert np.linalg.norm(plain - shifted) <= 2 * 5 / np.sqrt(n)
