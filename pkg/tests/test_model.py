import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mnlbandit import model
from oracles import mnl_probability


def unit_instance():
    return model.MNLInstance([1.0, 1.0], [1.0, 0.5])


class TestChoiceProb:
    def test_single_item_splits_evenly(self):
        inst = unit_instance()
        assert model.choice_prob(inst, (1,), 1) == pytest.approx(0.5, abs=1e-15)
        assert model.choice_prob(inst, (1,), 0) == pytest.approx(0.5, abs=1e-15)

    def test_two_items_no_purchase_third(self):
        inst = unit_instance()
        assert model.choice_prob(inst, (1, 2), 0) == pytest.approx(1 / 3, abs=1e-15)

    def test_item_off_offer_has_zero_probability(self):
        inst = unit_instance()
        assert model.choice_prob(inst, (1,), 2) == 0.0

    def test_out_of_range_outcome_rejected(self):
        inst = unit_instance()
        with pytest.raises(ValueError):
            model.choice_prob(inst, (1,), 3)
        with pytest.raises(ValueError):
            model.choice_prob(inst, (1,), -1)

    def test_duplicate_assortment_rejected(self):
        with pytest.raises(ValueError):
            model.choice_prob(unit_instance(), (1, 1), 0)

    def test_out_of_range_item_rejected(self):
        with pytest.raises(ValueError):
            model.choice_prob(unit_instance(), (1, 7), 0)


@st.composite
def instance_and_assortment(draw, allow_empty=True):
    n = draw(st.integers(min_value=1, max_value=8))
    v = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=5.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    r = draw(
        st.lists(
            st.floats(min_value=0.05, max_value=3.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    min_size = 0 if allow_empty else 1
    items = draw(
        st.lists(
            st.integers(min_value=1, max_value=n),
            min_size=min_size,
            max_size=n,
            unique=True,
        )
    )
    return model.MNLInstance(v, r), tuple(sorted(items))


class TestProbabilityInvariants:
    @given(instance_and_assortment())
    def test_outcomes_normalize(self, case):
        inst, s = case
        total = sum(model.choice_prob(inst, s, i) for i in (0, *s))
        assert total == pytest.approx(1.0, abs=1e-12)

    @given(instance_and_assortment())
    def test_matches_closed_form(self, case):
        inst, s = case
        for outcome in (0, *s):
            assert model.choice_prob(inst, s, outcome) == pytest.approx(
                mnl_probability(list(inst.attractions), s, outcome), abs=1e-12
            )

    @given(instance_and_assortment(allow_empty=False))
    def test_probabilities_shrink_when_offer_grows(self, case):
        inst, s = case
        outside = [i for i in range(1, inst.n_items + 1) if i not in s]
        if not outside:
            return
        bigger = tuple(sorted((*s, outside[0])))
        for outcome in (0, *s):
            assert model.choice_prob(inst, bigger, outcome) <= model.choice_prob(inst, s, outcome) + 1e-15


class TestExpectedRevenue:
    def test_empty_offer_earns_nothing(self):
        assert model.expected_revenue(unit_instance(), ()) == 0.0

    def test_two_item_value(self):
        # (1*1 + 0.5*1) / (1 + 2) = 0.5
        assert model.expected_revenue(unit_instance(), (1, 2)) == pytest.approx(0.5, abs=1e-15)

    def test_single_item_value(self):
        # 0.5*1 / (1 + 1) = 0.25
        assert model.expected_revenue(unit_instance(), (2,)) == pytest.approx(0.25, abs=1e-15)

    @given(instance_and_assortment())
    def test_agrees_with_probability_weighted_sum(self, case):
        inst, s = case
        direct = model.expected_revenue(inst, s)
        summed = sum(inst.revenues[i - 1] * model.choice_prob(inst, s, i) for i in s)
        assert direct == pytest.approx(summed, abs=1e-12)


class TestSampleChoice:
    def test_empirical_frequencies_match_probabilities(self):
        rng = np.random.default_rng(11)
        inst = model.MNLInstance([0.3, 0.8, 1.5], [1.0, 1.0, 1.0])
        s = (1, 2, 3)
        n = 100_000
        draws = np.array([model.sample_choice(inst, s, rng) for _ in range(n)])
        for outcome in (0, 1, 2, 3):
            p = model.choice_prob(inst, s, outcome)
            freq = float(np.mean(draws == outcome))
            se = np.sqrt(p * (1 - p) / n)
            assert abs(freq - p) <= 3 * se + 1e-12

    def test_one_uniform_draw_per_call(self):
        inst = model.MNLInstance([0.4, 1.2], [1.0, 1.0])
        s = (1, 2)
        rng = np.random.default_rng(42)
        outcomes = [model.sample_choice(inst, s, rng) for _ in range(50)]
        replay = np.random.default_rng(42)
        expected = []
        for _ in range(50):
            u = replay.random()
            thresholds = model._choice_thresholds(inst, s)
            expected.append(model._outcome_from_uniform(thresholds, s, u))
        assert outcomes == expected

    def test_same_seed_same_sequence(self):
        inst = model.MNLInstance([0.4, 1.2], [1.0, 1.0])
        a = [model.sample_choice(inst, (1, 2), np.random.default_rng(3)) for _ in range(1)]
        b = [model.sample_choice(inst, (1, 2), np.random.default_rng(3)) for _ in range(1)]
        assert a == b

    def test_dominant_item_is_almost_always_chosen(self):
        inst = model.MNLInstance([1e9], [1.0])
        rng = np.random.default_rng(5)
        draws = [model.sample_choice(inst, (1,), rng) for _ in range(2000)]
        assert np.mean(np.array(draws) == 1) > 0.999

    def test_empty_offer_rejected(self):
        with pytest.raises(ValueError):
            model.sample_choice(unit_instance(), (), np.random.default_rng(0))


class TestRandomInstance:
    def test_draw_order_is_attractions_then_revenues(self):
        rng = np.random.default_rng(123)
        inst = model.random_instance(4, (0.1, 1.0), (0.5, 1.5), rng)
        replay = np.random.default_rng(123)
        v = replay.uniform(0.1, 1.0, 4)
        r = replay.uniform(0.5, 1.5, 4)
        np.testing.assert_array_equal(inst.attractions, v)
        np.testing.assert_array_equal(inst.revenues, r)

    def test_values_respect_ranges(self):
        rng = np.random.default_rng(9)
        inst = model.random_instance(50, (0.2, 0.9), (1.0, 1.1), rng)
        assert np.all((inst.attractions >= 0.2) & (inst.attractions <= 0.9))
        assert np.all((inst.revenues >= 1.0) & (inst.revenues <= 1.1))

    def test_degenerate_range_is_constant(self):
        inst = model.random_instance(3, (0.7, 0.7), (1.0, 1.0), np.random.default_rng(1))
        np.testing.assert_allclose(inst.attractions, 0.7)
        np.testing.assert_allclose(inst.revenues, 1.0)

    def test_nonpositive_lower_bound_rejected(self):
        with pytest.raises(ValueError):
            model.random_instance(3, (0.0, 1.0), (0.5, 1.5), np.random.default_rng(0))
        with pytest.raises(ValueError):
            model.random_instance(3, (0.1, 1.0), (-0.5, 1.5), np.random.default_rng(0))

    def test_requires_generator_and_items(self):
        with pytest.raises(ValueError):
            model.random_instance(3)
        with pytest.raises(ValueError):
            model.random_instance(0, rng=np.random.default_rng(0))


class TestInstance:
    def test_rejects_negative_attractions_and_nonpositive_revenues(self):
        with pytest.raises(ValueError):
            model.MNLInstance([-0.1], [1.0])
        with pytest.raises(ValueError):
            model.MNLInstance([0.5], [0.0])

    def test_zero_attraction_is_allowed(self):
        inst = model.MNLInstance([0.0, 0.5], [1.0, 1.0])
        assert model.choice_prob(inst, (1,), 1) == 0.0

    def test_arrays_are_immutable(self):
        inst = unit_instance()
        with pytest.raises(ValueError):
            inst.attractions[0] = 2.0

    def test_attraction_bound_flag(self):
        assert unit_instance().within_attraction_bound(1.0)
        big = model.MNLInstance([1.8], [1.0])
        assert not big.within_attraction_bound(1.0)
        assert big.within_attraction_bound(2.0)

    def test_json_round_trip(self, tmp_path):
        inst = model.MNLInstance([0.25, 0.75], [1.5, 0.5])
        path = tmp_path / "instance.json"
        model.save_instance(inst, path)
        data = json.loads(path.read_text())
        assert set(data) == {"n_items", "v", "r"}
        loaded = model.load_instance(path)
        np.testing.assert_array_equal(loaded.attractions, inst.attractions)
        np.testing.assert_array_equal(loaded.revenues, inst.revenues)
        assert loaded.digest() == inst.digest()

    def test_unknown_json_keys_rejected(self):
        with pytest.raises(ValueError):
            model.MNLInstance.from_json_dict({"n_items": 1, "v": [1.0], "r": [1.0], "extra": 1})

    def test_mismatched_n_items_rejected(self):
        with pytest.raises(ValueError):
            model.MNLInstance.from_json_dict({"n_items": 3, "v": [1.0], "r": [1.0]})


class TestAsAssortment:
    def test_sorts_and_validates(self):
        assert model.as_assortment([3, 1], 5) == (1, 3)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            model.as_assortment([1, 1], 5)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            model.as_assortment([0], 5)
        with pytest.raises(ValueError):
            model.as_assortment([6], 5)
