import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeau.arith import (
    Factorization,
    PhasedRational,
    PhaseMismatch,
    UnknownValue,
    ValueStore,
    check_gcd_facts,
    eval_multiplicative,
    factorize,
    is_prime,
    primes_up_to,
)


def test_factorize_examples():
    assert factorize(1).entries == ()
    assert factorize(91).entries == ((7, 1), (13, 1))
    # 10773 = 3^4 * 7 * 19
    assert factorize(10773).entries == ((3, 4), (7, 1), (19, 1))


def test_factorize_rejects_zero():
    with pytest.raises(ValueError):
        factorize(0)


@given(st.integers(min_value=1, max_value=10**6))
@settings(max_examples=200, deadline=None)
def test_factorize_round_trip(n):
    f = factorize(n)
    assert f.n == n
    primes = [p for p, _ in f.entries]
    assert primes == sorted(primes) and len(set(primes)) == len(primes)


def test_factorization_validates():
    with pytest.raises(ValueError):
        Factorization(((4, 1),))
    with pytest.raises(ValueError):
        Factorization(((5, 1), (3, 1)))
    with pytest.raises(ValueError):
        Factorization(((3, 0),))


def test_primes_up_to():
    assert primes_up_to(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert primes_up_to(1) == []
    assert all(is_prime(p) for p in primes_up_to(500))


class TestPhasedRational:
    def test_multiplication_adds_phases(self):
        a = PhasedRational.of(3, 1)
        b = PhasedRational.of(2, 2)
        assert a * b == PhasedRational.of(6, 0)

    def test_cube_is_real(self):
        for phase in (0, 1, 2):
            assert PhasedRational.of(5, phase).cube() == PhasedRational.of(125, 0)

    def test_addition_same_phase(self):
        a = PhasedRational.of(3, 1)
        b = PhasedRational.of(4, 1)
        assert a + b == PhasedRational.of(7, 1)

    def test_addition_with_zero(self):
        z = PhasedRational.of(0)
        a = PhasedRational.of(Fraction(2, 3), 2)
        assert z + a == a and a + z == a

    def test_addition_phase_mismatch(self):
        with pytest.raises(PhaseMismatch):
            PhasedRational.of(1, 1) + PhasedRational.of(1, 2)

    def test_zero_is_phase_zero(self):
        assert PhasedRational.of(0, 2).phase == 0

    @given(
        st.tuples(st.fractions(), st.integers(0, 2)),
        st.tuples(st.fractions(), st.integers(0, 2)),
        st.tuples(st.fractions(), st.integers(0, 2)),
    )
    @settings(max_examples=150, deadline=None)
    def test_multiplication_associative(self, a, b, c):
        x, y, z = (PhasedRational.of(m, p) for m, p in (a, b, c))
        assert (x * y) * z == x * (y * z)


class TestValueStore:
    def test_identity(self):
        assert eval_multiplicative(ValueStore.identity(), 91) == PhasedRational.of(91)
        assert eval_multiplicative(ValueStore.identity(), 1) == PhasedRational.of(1)

    def test_counterexample_c0(self):
        store = ValueStore.f2_counterexample(0)
        assert eval_multiplicative(store, 6) == PhasedRational.of(0)
        assert eval_multiplicative(store, 18) == PhasedRational.of(18)

    def test_counterexample_phase(self):
        store = ValueStore.f2_counterexample(PhasedRational.of(3, 1))
        v = eval_multiplicative(store, 3)
        assert v.magnitude == 3 and v.phase == 1

    def test_map_backed_partial(self):
        store = ValueStore.from_values({(2, 1): 5})
        assert eval_multiplicative(store, 2) == PhasedRational.of(5)
        with pytest.raises(UnknownValue):
            eval_multiplicative(store, 3)

    @given(st.integers(2, 10**4), st.integers(2, 10**4))
    @settings(max_examples=150, deadline=None)
    def test_multiplicativity(self, m, n):
        if math.gcd(m, n) != 1:
            return
        store = ValueStore.f2_counterexample(99)
        lhs = eval_multiplicative(store, m * n)
        rhs = eval_multiplicative(store, m) * eval_multiplicative(store, n)
        assert lhs == rhs


class TestGcdFacts:
    def test_rejects_bad_input(self):
        for bad in (4, 9, 2, 3):
            with pytest.raises(ValueError):
                check_gcd_facts(bad)

    def test_p5_mod7_branch(self):
        report = check_gcd_facts(5)
        by_label = {c.label: c for c in report.claims}
        c = by_label["gcd(p^2-p+1, (p^2+3)/4) = 7 iff p = 5 (mod 7)"]
        assert c.computed == 7 and c.branch == "p = 5 (mod 7)" and c.passed
        c = by_label["gcd(2p-1, p^2-p+1) = 3 iff p = -1 (mod 3)"]
        assert c.computed == 3 and c.passed

    def test_p11_mod3_branch(self):
        report = check_gcd_facts(11)
        by_label = {c.label: c for c in report.claims}
        c = by_label["gcd((p+1)/2, p^2-p+1) = 3 iff p = -1 (mod 3)"]
        assert c.computed == 3 and c.branch == "p = -1 (mod 3)" and c.passed

    def test_sweep_to_10000(self):
        for p in primes_up_to(10**4):
            if p >= 5:
                assert check_gcd_facts(p).all_pass, f"failure at p={p}"
