from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibhodge.indicial import (
    BaseSpectrum, IndicialError, Surd, b_indicial, critical_weight, fibred_cusp_indicial, indicial_for,
    is_fredholm, parse_spectrum, scattering_indicial,
)
from fibhodge.topo import MetricClass

FB, FC = MetricClass.FIBRED_BOUNDARY, MetricClass.FIBRED_CUSP


def gammas(rep):
    return [r.gamma for r in rep.roots]


def circle_spectrum(top=2):
    return parse_spectrum([(m * m, 0, 1 if m == 0 else 2) for m in range(top + 1)])


class TestSurd:
    def test_sqrt_normalises(self):
        assert Surd.sqrt(8) == Surd(0, 2, 2)
        assert Surd.sqrt(Fraction(9, 4)) == Surd(Fraction(3, 2))
        assert Surd.sqrt(0) == Surd(0)

    def test_ordering_across_radicals(self):
        assert Surd.sqrt(2) < Surd(Fraction(3, 2))
        assert Surd(1) + Surd.sqrt(2) > Surd.sqrt(5)
        assert sorted([Surd.sqrt(3), Surd(1), Surd.sqrt(2)]) == [Surd(1), Surd.sqrt(2), Surd.sqrt(3)]

    @given(st.fractions(0, 50, max_denominator=9), st.fractions(0, 50, max_denominator=9))
    def test_order_matches_float(self, x, y):
        a, b = Surd.sqrt(x), Surd.sqrt(y)
        if x != y:
            assert (a < b) == (float(a) < float(b))
        else:
            assert a == b


class TestB:
    def test_zero_and_one(self):
        rep = b_indicial(parse_spectrum([(0, 0, 1), (1, 0, 1)]))
        assert gammas(rep) == [Surd(-1), Surd(0), Surd(1)]
        assert rep.roots[1].multiplicity == 1

    def test_empty(self):
        rep = b_indicial(BaseSpectrum(()))
        assert rep.roots == ()
        assert rep.fredholm_gaps == ((None, None),)

    def test_circle(self):
        assert gammas(b_indicial(circle_spectrum())) == [Surd(x) for x in (-2, -1, 0, 1, 2)]

    def test_fredholm(self):
        rep = b_indicial(circle_spectrum())
        assert is_fredholm(rep, Fraction(1, 2))
        assert not is_fredholm(rep, 0)

    def test_log_warning(self):
        assert b_indicial(circle_spectrum()).warnings


class TestScattering:
    def test_harmonic_degree(self):
        rep = scattering_indicial(parse_spectrum([(0, 1, 1)]), 5)
        assert gammas(rep) == [Surd(1), Surd(4)]

    def test_double_root(self):
        rep = scattering_indicial(parse_spectrum([(0, 2, 1)]), 4)
        assert gammas(rep) == [Surd(2)]
        assert rep.roots[0].multiplicity == 2
        assert not is_fredholm(rep, 2)

    def test_constants(self):
        assert gammas(scattering_indicial(parse_spectrum([(0, 0, 1)]), 4)) == [Surd(0), Surd(4)]

    def test_critical(self):
        assert scattering_indicial(BaseSpectrum(()), 6).critical == 2

    def test_surd_roots(self):
        rep = scattering_indicial(parse_spectrum([(1, 1, 1)]), 4)
        # 2 +- sqrt(1 + 1)
        assert gammas(rep) == [Surd(2, -1, 2), Surd(2, 1, 2)]
        assert is_fredholm(rep, 2)

    def test_limitation_recorded(self):
        assert any("coupled" in note for note in scattering_indicial(BaseSpectrum(()), 4).notes)

    def test_small_n(self):
        with pytest.raises(IndicialError):
            scattering_indicial(BaseSpectrum(()), 1)


def test_all_harmonic_degrees():
    for n in range(2, 11):
        for k in range(n + 1):
            got = set(gammas(scattering_indicial(parse_spectrum([(0, k, 1)]), n)))
            assert got == {Surd(k), Surd(n - k)}


spectra = st.lists(st.tuples(st.fractions(0, 30, max_denominator=5), st.integers(0, 6), st.integers(1, 3)),
                   max_size=6)


@settings(max_examples=60)
@given(spectra)
def test_b_negation_symmetric(entries):
    g = set(gammas(b_indicial(parse_spectrum(entries))))
    assert g == {-x for x in g}


@settings(max_examples=60)
@given(spectra, st.integers(2, 10))
def test_scattering_reflection_symmetric(entries, n):
    g = set(gammas(scattering_indicial(parse_spectrum(entries), n)))
    assert g == {Surd(n) - x for x in g}


@settings(max_examples=60)
@given(spectra, st.integers(2, 8))
def test_gaps_are_fredholm(entries, n):
    rep = scattering_indicial(parse_spectrum(entries), n)
    for lo, hi in rep.fredholm_gaps:
        if lo is None and hi is None:
            probes = [Fraction(0)]
        elif lo is None:
            probes = [Fraction(int(float(hi)) - 1)]
        elif hi is None:
            probes = [Fraction(int(float(lo)) + 1)]
        else:
            # a rational strictly between two distinct roots
            mid = Fraction((float(lo) + float(hi)) / 2).limit_denominator(10**6)
            probes = [mid] if lo < Surd(mid) < hi else []
        for a in probes:
            assert is_fredholm(rep, a)


class TestCritical:
    def test_values(self):
        assert critical_weight(FB, 2, 1) == Fraction(1, 2)
        assert critical_weight(FC, 2, 1) == Fraction(-1, 2)
        assert critical_weight(FC, 3, 0) == 0

    @given(st.integers(0, 20), st.integers(0, 20))
    def test_formulas(self, b, f):
        assert critical_weight(FB, b, f) == Fraction(b - 1, 2)
        assert critical_weight(FC, b, f) == Fraction(-f, 2)

    def test_dispatch(self):
        spec = parse_spectrum([(0, 0, 1), (0, 2, 1)], b=2)
        fb = indicial_for(FB, spec, 4, 2, 1)
        assert fb.critical == Fraction(1, 2)
        assert gammas(fb) == [Surd(0), Surd(1), Surd(2), Surd(3)]
        fc = fibred_cusp_indicial(parse_spectrum([(0, 0, 1)]), 2)
        assert gammas(fc) == [Surd(-2), Surd(0)]


class TestSpectrumValidation:
    def test_negative(self):
        with pytest.raises(IndicialError):
            parse_spectrum([(-1, 0, 1)])

    def test_degree_range(self):
        with pytest.raises(IndicialError):
            parse_spectrum([(0, 3, 1)], b=2)

    def test_connected_oriented_base(self):
        with pytest.raises(IndicialError):
            parse_spectrum([(0, 0, 1), (2, 2, 1)], b=2)

    def test_rational_strings(self):
        spec = parse_spectrum([("3/4", 0, 1)])
        assert spec.eigenvalues[0].lambda_sq == Fraction(3, 4)
