from __future__ import annotations

import json

import numpy as np
import pytest

from attractors.algebra import exact_array, is_positive_definite
from attractors.errors import NoAttractor
from attractors.verify import (
    SUITES,
    SuiteResult,
    admissible,
    random_admissible_symmetric,
    random_charge,
    random_mukai_pair,
    random_ns_lattice,
    random_pd_gram2,
    random_period,
    random_symmetric_charge,
    run_suite,
)

SMALL = {
    "rmd": {"n": 300},
    "residuals": {"n": 30},
    "roundtrip": {"n": 30},
    "exs": {"n": 20},
    "legendrian": {"n": 3},
    "density": {"heights": (3, 6), "identity_height": 3, "grid": 21},
}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_pass_small(name):
    res = run_suite(name, seed=1, **SMALL[name])
    assert res.passed, res.failures[:3]
    assert res.checked > 0
    json.dumps(res.to_json())


def test_suites_are_seed_deterministic():
    a = run_suite("residuals", seed=5, n=10).to_json()
    b = run_suite("residuals", seed=5, n=10).to_json()
    a.pop("seconds"), b.pop("seconds")
    assert a == b


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_run_suite_turns_attractor_errors_into_failures(monkeypatch):
    def boom(rng, **kw):
        raise NoAttractor("forced")

    monkeypatch.setitem(SUITES, "rmd", boom)
    res = run_suite("rmd")
    assert not res.passed and "forced" in res.failures[0]["error"]


def test_failures_are_truncated_in_json():
    res = SuiteResult("x", False, 100, [{"i": k} for k in range(100)])
    assert len(res.to_json()["failures"]) == 20


# -- generators ------------------------------------------------------------------------

def test_random_charge_singular_P(rng):
    for _ in range(50):
        c = random_charge(rng, singular_P=True)
        assert round(np.linalg.det(np.asarray(c.P, dtype=float))) == 0


def test_random_symmetric_charge(rng):
    for _ in range(50):
        c = random_symmetric_charge(rng)
        assert np.array_equal(c.P, c.P.T) and np.array_equal(c.Q, c.Q.T)


def test_random_admissible(rng):
    for _ in range(50):
        assert admissible(random_admissible_symmetric(rng))


def test_random_period_symmetry(rng):
    from fractions import Fraction

    from attractors.algebra import inverse3

    for _ in range(50):
        p = random_period(rng)
        assert is_positive_definite(exact_array(p.R), exact=True)
        S = exact_array(p.N) @ inverse3(exact_array(p.R))
        assert np.all(S == S.T)
        assert all(isinstance(x, (int, Fraction)) for x in S.ravel())


def test_random_lattices(rng):
    for _ in range(50):
        L = random_pd_gram2(rng)
        assert L.even and L.rank == 2
        assert is_positive_definite(exact_array(L.matrix), exact=True)
        N = random_ns_lattice(rng)
        ev = np.linalg.eigvalsh(N.matrix.astype(float))
        assert N.even and (ev > 0).sum() == 1
        v1, v2 = random_mukai_pair(rng, N)
        from attractors.k3 import mukai_pair

        g = np.array([[mukai_pair(v1, v1), mukai_pair(v1, v2)], [mukai_pair(v2, v1), mukai_pair(v2, v2)]], dtype=float)
        assert np.all(np.linalg.eigvalsh(g) > 0)
