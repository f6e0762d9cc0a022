import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unlearn_gauge.losses import (
    LOSS_FUNCTIONS,
    LikelihoodBundle,
    dpo_loss,
    ga_loss,
    gd_loss,
    idk_loss,
    npo_loss,
    simnpo_loss,
)

nll = st.floats(min_value=0.0, max_value=20.0, allow_nan=False)


def bundle(**kw):
    base = dict(nll_theta=1.0, nll_ref=1.0, nll_retain=1.0,
                nll_idk=1.0, nll_idk_ref=1.0, answer_len=1, beta=1.0, gamma=0.0)
    base.update(kw)
    return LikelihoodBundle(**base)


class TestPointValues:
    def test_ga_on_certain_answer(self):
        # every token probability 1 means zero negative log-likelihood
        assert ga_loss(bundle(nll_theta=0.0)) == 0.0

    def test_gd_cancellation(self):
        assert gd_loss(bundle(nll_theta=2.5, nll_retain=2.5)) == 0.0

    def test_idk_passthrough(self):
        assert idk_loss(bundle(nll_idk=0.7)) == 0.7

    def test_npo_at_unit_ratio(self):
        # ratio 1 puts the sigmoid at 1/2
        assert npo_loss(bundle(nll_theta=3.0, nll_ref=3.0, beta=1.0)) \
            == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_dpo_at_equal_ratios(self):
        b = bundle(nll_theta=2.0, nll_ref=2.0, nll_idk=5.0, nll_idk_ref=5.0, beta=1.0)
        assert dpo_loss(b) == pytest.approx(math.log(2), abs=1e-12)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 7.5])
    def test_dpo_symmetric_point_scales_with_beta(self, beta):
        b = bundle(nll_theta=1.0, nll_ref=1.0, nll_idk=4.0, nll_idk_ref=4.0, beta=beta)
        assert dpo_loss(b) == pytest.approx(math.log(2) / beta, abs=1e-12)

    def test_simnpo_reduces_to_npo(self):
        b = bundle(nll_theta=0.4, nll_ref=1.9, gamma=0.0, answer_len=1)
        assert simnpo_loss(b) == npo_loss(b)


class TestProperties:
    @given(st.lists(st.integers(-40, 40).map(lambda i: i / 8.0), min_size=2, max_size=10,
                    unique=True),
           st.floats(0.1, 5.0))
    def test_npo_strictly_decreasing_in_ratio(self, log_ratios, beta):
        log_ratios = sorted(log_ratios)
        # log r_y = nll_ref - nll_theta; larger means the model still prefers the answer
        losses = [
            npo_loss(LikelihoodBundle(nll_theta=5.0, nll_ref=5.0 + lr, beta=beta))
            for lr in log_ratios
        ]
        assert all(a < b for a, b in zip(losses, losses[1:]))

    @given(nll, nll, st.floats(0.1, 10.0))
    def test_npo_always_positive(self, t, r, beta):
        assert npo_loss(LikelihoodBundle(nll_theta=t, nll_ref=r, beta=beta)) > 0.0

    def test_simnpo_matches_npo_on_random_bundles(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            b = LikelihoodBundle(
                nll_theta=float(rng.uniform(0, 10)),
                nll_ref=float(rng.uniform(0, 10)),
                beta=float(rng.uniform(0.1, 5)),
                gamma=0.0,
                answer_len=1,
            )
            assert simnpo_loss(b) == npo_loss(b)

    @given(nll, nll, nll, nll, st.floats(0.1, 5.0))
    def test_dpo_swap_reconstruction(self, t, r, i, ir, beta):
        b = LikelihoodBundle(nll_theta=t, nll_ref=r, nll_idk=i, nll_idk_ref=ir, beta=beta)
        swapped = LikelihoodBundle(nll_theta=i, nll_ref=ir, nll_idk=t, nll_idk_ref=r, beta=beta)
        # -log sig(x) - log sig(-x) >= 2 ln 2, with equality at the symmetric point
        total = beta * (dpo_loss(b) + dpo_loss(swapped))
        assert total >= 2 * math.log(2) - 1e-12


class TestValidation:
    def test_missing_field_for_loss(self):
        plain = LikelihoodBundle(nll_theta=1.0)
        for fn in (gd_loss, idk_loss, dpo_loss, npo_loss, simnpo_loss):
            with pytest.raises(ValueError, match="missing"):
                fn(plain)

    def test_bundle_preconditions(self):
        with pytest.raises(ValueError):
            LikelihoodBundle(nll_theta=-1.0)
        with pytest.raises(ValueError):
            LikelihoodBundle(nll_theta=1.0, beta=0.0)
        with pytest.raises(ValueError):
            LikelihoodBundle(nll_theta=1.0, answer_len=0)
        with pytest.raises(ValueError):
            LikelihoodBundle(nll_theta=float("nan"))

    def test_registry_is_complete(self):
        assert set(LOSS_FUNCTIONS) == {"ga", "gd", "idk", "dpo", "npo", "simnpo"}
