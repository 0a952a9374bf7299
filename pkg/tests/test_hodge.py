import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibhodge.catalog import builtin_entries
from fibhodge.exactlin import RatMatrix, cartan_matrix
from fibhodge.hodge import (
    HodgeError, NonFredholmWeight, PairingInput, hodge_dims, hyperkahler_checks, l2_signature, tau_invariant,
    weight_to_perversity,
)
from fibhodge.intersection import IHQuery, InsufficientData, LerayData, duality_defect, ih_extended
from fibhodge.topo import MetricClass, StratumProfile, is_witt, middle_perversities

from synthetic import cylinder_profile, product_profile

CATALOG = builtin_entries()
FB, FC = MetricClass.FIBRED_BOUNDARY, MetricClass.FIBRED_CUSP
EPS = Fraction(1, 10)


def hodge(name):
    m = CATALOG[name]
    return hodge_dims(m.profile, m.metric, IHQuery(m.profile, m.leray, m.natural_maps))


def _profile(n, b, f):
    betti_F = (1,) + (0,) * (f - 1) + (1,) if f else (1,)
    betti_B = (1,) + (0,) * (b - 1) + (1,) if b else (1,)
    return StratumProfile(n, b, f, (1,) + (0,) * n, (0,) * n, betti_B, betti_F, restriction_ranks=(0,) * n)


class TestWeights:
    @pytest.mark.parametrize("k", range(3))
    def test_fc_f1(self, k):
        p = _profile(3, 1, 1)
        assert weight_to_perversity(EPS, k, p, FC) == 0

    def test_fc_f2(self):
        p = _profile(4, 1, 2)
        assert weight_to_perversity(-EPS, 0, p, FC) == 0
        assert weight_to_perversity(EPS, 0, p, FC) == 1

    @pytest.mark.parametrize("a", [EPS, -EPS])
    def test_fb_shift(self, a):
        # floor(n/2 - k + a + f/2) with n = 4, k = 2, f = 1 is f + b/2 - k = 0
        p = _profile(4, 2, 1)
        assert weight_to_perversity(a, 2, p, FB) == 0

    def test_excluded_weight(self):
        p = _profile(3, 1, 1)
        with pytest.raises(NonFredholmWeight):
            weight_to_perversity(Fraction(1, 2), 0, p, FC)

    @settings(max_examples=50)
    @given(st.integers(1, 5), st.integers(0, 6), st.fractions(-3, 3, max_denominator=7))
    def test_fb_is_shifted_fc(self, f, k, a):
        p = _profile(f + 3, 2, f)
        shifted = Fraction(p.n, 2) - k + a
        try:
            want = weight_to_perversity(shifted, k, p, FC)
        except NonFredholmWeight:
            with pytest.raises(NonFredholmWeight):
                weight_to_perversity(a, k, p, FB)
            return
        assert weight_to_perversity(a, k, p, FB) == want


class TestDispatch:
    def test_taub_nut(self):
        assert hodge("taub_nut").dims == (0, 0, 1, 0, 0)

    def test_schwarzschild(self):
        assert hodge("schwarzschild").dims == (0, 0, 2, 0, 0)

    def test_atiyah_hitchin(self):
        assert hodge("atiyah_hitchin").dims == (0,) * 5

    def test_case_tags_name_the_branch(self):
        t = hodge("taub_nut")
        assert t.case_tags[2] == "fb/b-even/j=f+b/2-k=0"
        assert hodge("alg_D4").case_tags[2].startswith("fb/b-odd")
        assert hodge("ale_A3").case_tags[2] == "scattering/k=n/2 image rel->abs"

    def test_b_and_scattering_need_trivial_fibre(self):
        m = CATALOG["taub_nut"]
        with pytest.raises(HodgeError):
            hodge_dims(m.profile, MetricClass.SCATTERING)

    def test_torus_row_cancels_when_monodromy_kills_it(self):
        # the q = 1 row of alg_D4 is zero, so both middle truncations agree
        m = CATALOG["alg_D4"]
        t = hodge_dims(m.profile, FC, IHQuery(m.profile, m.leray))
        assert t.dims == (1, 0, 4, 0, 1)
        assert "identical-truncation" in t.case_tags[2]

    def test_non_witt_cusp_without_maps(self):
        # T^2 bundle over S^2 with a nonzero d_2 out of the discarded row
        l = LerayData(2, 2, ((1, 2, 1), (0, 0, 0), (1, 2, 1)),
                      {(2, 0, 1): RatMatrix.from_rows([[1, 0]]), (2, 0, 2): RatMatrix.from_rows([[0], [1]])})
        dM, bM = (1, 1, 0, 1, 1), (1, 1, 0, 0, 0, 0)
        r = tuple(RatMatrix.from_rows([[1]]) if k < 2 else RatMatrix.zeros(dM[k], bM[k]) for k in range(5))
        p = StratumProfile(5, 2, 2, bM, dM, (1, 0, 1), (1, 2, 1), r)
        assert duality_defect(p, l, 0) == 0
        with pytest.raises(InsufficientData, match="natural map"):
            hodge_dims(p, FC, IHQuery(p, l))

    def test_non_witt_cusp_with_supplied_maps(self):
        m = CATALOG["alg_D4"]
        maps = {(1, k): RatMatrix.identity(d) if k == 2 else RatMatrix.zeros(d, d)
                for k, d in enumerate(ih_extended(m.profile, m.leray, 1).dims)}
        t = hodge_dims(m.profile, FC, IHQuery(m.profile, m.leray, maps))
        assert t.dims[2] == 4

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_star_symmetry(self, name):
        d = hodge(name).dims
        assert d == d[::-1]


def _f0(seed):
    rng = random.Random(seed)
    return cylinder_profile(rng, rng.randint(2, 7))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_f0_embeds_in_fibred_classes(seed):
    p, l = _f0(seed)
    q = IHQuery(p, l)
    assert hodge_dims(p, FB, q).dims == hodge_dims(p, MetricClass.SCATTERING, q).dims
    assert hodge_dims(p, FC, q).dims == hodge_dims(p, MetricClass.B, q).dims


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_witt_middle_tables_coincide(seed):
    rng = random.Random(seed)
    p, l = product_profile(rng, rng.randint(0, 3), rng.choice([2, 4]))
    lo, hi = middle_perversities(p.f)
    same = ih_extended(p, l, lo).dims == ih_extended(p, l, hi).dims
    if is_witt(p):
        assert same


def test_witt_sampler_hits_witt_profiles():
    hits = 0
    for seed in range(200):
        rng = random.Random(seed)
        p, _ = product_profile(rng, rng.randint(0, 3), rng.choice([2, 4]))
        hits += is_witt(p)
    assert hits > 10


class TestSignature:
    @pytest.mark.parametrize("k", range(2, 10))
    def test_ale(self, k):
        assert l2_signature(PairingInput(-cartan_matrix("A", k - 1))) == -(k - 1)

    @pytest.mark.parametrize("k", range(1, 5))
    def test_alf_a(self, k):
        m = CATALOG[f"alf_A{k}"]
        assert l2_signature(m.pairing, expected_size=hodge(m.name).dims[2]) == -k

    def test_empty(self):
        assert l2_signature(PairingInput(RatMatrix.zeros(0, 0))) == 0

    def test_size_mismatch(self):
        with pytest.raises(HodgeError):
            l2_signature(PairingInput(RatMatrix.identity(2)), expected_size=3)

    def test_asymmetric_rejected(self):
        with pytest.raises(HodgeError):
            PairingInput(RatMatrix.from_rows([[0, 1], [0, 0]]))

    @pytest.mark.parametrize("name", ["taub_nut", "alf_A1", "alf_A2", "alf_A3", "alf_A4", "alf_D4"])
    def test_tau_alf(self, name):
        assert tau_invariant(CATALOG[name].pairing) == -1

    def test_tau_alg(self):
        assert tau_invariant(CATALOG["alg_D4"].pairing) == 0

    def test_tau_identical(self):
        f = -cartan_matrix("D", 5)
        assert tau_invariant(PairingInput(f, f)) == 0

    def test_tau_needs_both(self):
        with pytest.raises(HodgeError):
            tau_invariant(PairingInput(RatMatrix.identity(1)))

    @given(st.integers(0, 8))
    def test_negative_definite_is_minus_size(self, n):
        assert l2_signature(PairingInput(-RatMatrix.identity(n))) == -n


class TestHyperkahler:
    def test_taub_nut(self):
        assert hyperkahler_checks(hodge("taub_nut"), -1, True, 1).passed

    @pytest.mark.parametrize("k", range(2, 6))
    def test_ale(self, k):
        m = CATALOG[f"ale_A{k}"]
        assert hyperkahler_checks(hodge(m.name), -(k - 1), True, 1, m.pairing.rel_matrix).passed

    def test_flipped_sign_fails(self):
        rep = hyperkahler_checks(hodge("taub_nut"), +1, True, 1)
        assert not rep.passed
        assert dict(rep.checks)["signature sign matches parity of k"] is False

    def test_indefinite_rel_fails(self):
        rep = hyperkahler_checks(hodge("taub_nut"), -1, True, 1, RatMatrix.diagonal([1, -1]))
        assert not rep.passed

    def test_not_flagged(self):
        assert hyperkahler_checks(hodge("schwarzschild"), 0, False, 1).checks == ()
