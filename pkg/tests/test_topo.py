import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibhodge.exactlin import RatMatrix, rank
from fibhodge.topo import (
    MetricClass, ProfileError, StratumProfile, is_witt, middle_perversities, pair_cohomology, relative_betti,
)

from synthetic import cylinder_profile, product_profile


def disk_bundle_ranks():
    # betti_M = (1,0,1,0,0), betti_dM = (1,0,0,1), restriction rank 0 in degree 2
    return StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 1), (1, 1),
                          restriction_ranks=(1, 0, 0, 0))


class TestPairCohomology:
    def test_les_chase_example(self):
        pc = pair_cohomology(disk_bundle_ranks())
        assert pc.betti_rel == (0, 0, 1, 0, 1)
        assert pc.image_ranks[2] == 1

    def test_closed_manifold(self):
        pc = relative_betti((1, 0, 2, 0, 1), (0, 0, 0, 0), (0, 0, 0, 0))
        assert pc.betti_rel == (1, 0, 2, 0, 1)
        assert pc.image_ranks == (1, 0, 2, 0, 1)

    def test_closed_manifold_profile(self):
        p = StratumProfile(4, 2, 1, (1, 0, 2, 0, 1), (0, 0, 0, 0), (1, 0, 1), (1, 1),
                           restriction_ranks=(0, 0, 0, 0))
        assert pair_cohomology(p).betti_rel == p.betti_M

    def test_cylinder_dimension_mismatch_rejected(self):
        # a 2-dimensional total space cannot carry a circle bundle over a circle
        with pytest.raises(ProfileError, match="n = b \\+ f \\+ 1"):
            StratumProfile(2, 1, 1, (1, 1, 0), (1, 1), (1, 1), (1, 1))

    def test_wrong_vector_length_rejected(self):
        with pytest.raises(ProfileError, match="betti_dM"):
            StratumProfile(2, 1, 0, (1, 1, 0), (1, 1, 0), (1, 1), (1,))

    def test_asymmetric_boundary_rejected(self):
        with pytest.raises(ProfileError, match="Poincare"):
            StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 1, 0), (1, 0, 1), (1, 1))

    def test_rank_out_of_range(self):
        with pytest.raises(ProfileError):
            StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 1), (1, 1),
                           restriction_ranks=(1, 0, 1, 0))

    def test_ranks_must_match_matrices(self):
        r = (RatMatrix.from_rows([[1]]), RatMatrix.zeros(0, 0), RatMatrix.zeros(0, 1), RatMatrix.zeros(1, 0))
        StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 1), (1, 1), r, (1, 0, 0, 0))
        with pytest.raises(ProfileError, match="disagree"):
            StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 1), (1, 1), r, (0, 0, 0, 0))

    def test_matrix_shape_checked(self):
        r = (RatMatrix.from_rows([[1]]),) * 4
        with pytest.raises(ProfileError, match="shape"):
            StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 1), (1, 1), r)


class TestPerversities:
    @pytest.mark.parametrize("f, expected", [(1, (0, 0)), (2, (1, 0)), (0, (0, -1)), (3, (1, 1)), (4, (2, 1))])
    def test_middle(self, f, expected):
        assert middle_perversities(f) == expected

    @given(st.integers(0, 50))
    def test_gap(self, f):
        lo, hi = middle_perversities(f)
        assert lo - hi == (0 if f % 2 else 1)

    def test_witt(self):
        circle = StratumProfile(4, 2, 1, (1, 0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 1), (1, 1),
                                restriction_ranks=(1, 0, 0, 0))
        assert is_witt(circle)
        torus = StratumProfile(4, 1, 2, (1, 1, 4, 0, 0), (1, 3, 3, 1), (1, 1), (1, 2, 1),
                               restriction_ranks=(1, 1, 0, 0))
        assert not is_witt(torus)
        point = StratumProfile(2, 1, 0, (1, 1, 0), (1, 1), (1, 1), (1,), restriction_ranks=(1, 1))
        assert not is_witt(point)


def test_metric_aliases():
    assert MetricClass.parse("fb") is MetricClass.FIBRED_BOUNDARY
    assert MetricClass.parse("Fibred-Cusp") is MetricClass.FIBRED_CUSP
    assert MetricClass.parse("sc") is MetricClass.SCATTERING
    with pytest.raises(ProfileError):
        MetricClass.parse("kahler")


def _random(seed):
    rng = random.Random(seed)
    if rng.random() < 0.3:
        return cylinder_profile(rng, rng.randint(2, 6))[0]
    return product_profile(rng, rng.randint(0, 3), rng.randint(1, 3))[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_euler_characteristic_of_les(seed):
    p = _random(seed)
    pc = pair_cohomology(p)
    dm = list(p.betti_dM) + [0]
    assert sum((-1) ** k * (pc.betti_rel[k] - p.betti_M[k] + dm[k]) for k in range(p.n + 1)) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_ranks_only_agree_with_matrices(seed):
    p = _random(seed)
    ranks = tuple(rank(r) for r in p.restriction)
    q = StratumProfile(p.n, p.b, p.f, p.betti_M, p.betti_dM, p.betti_B, p.betti_F, restriction_ranks=ranks)
    assert pair_cohomology(q) == pair_cohomology(p)
