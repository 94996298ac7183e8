import math

import pytest

import kantolab as kl


def test_catalogs():
    assert "power" in kl.phi_catalog()
    assert "logistic" in kl.kernel_catalog()
    assert "sin" in kl.corpus_catalog()


def test_norm_of_sine():
    phi = kl.Phi("power:p=2")
    assert kl.luxemburg_norm(phi, kl.Function("sin")) == pytest.approx(math.sqrt(0.5), rel=1e-9)
    assert kl.modular(phi, kl.Function("linear")) == pytest.approx(1 / 3, rel=1e-12)


def test_divergent_modular_is_inf():
    assert math.isinf(kl.modular(kl.Phi("exp"), kl.Function("shifted_log"), 2.0))


def test_moment_and_constants():
    ramp = kl.Kernel("ramp")
    assert ramp.compact
    assert kl.moment(ramp, 0.0) == pytest.approx(1.0)
    assert kl.apply(ramp, kl.Function("const:c=2"), 7, [0.0, 0.3, 1.0]) == [2.0, 2.0, 2.0]


def test_rate():
    c = kl.error_curve(kl.Function("sin"), kl.Phi("power:p=2"), kl.Kernel("ramp"), [8, 16, 32, 64])
    assert c["slope"] == pytest.approx(-1.0, abs=0.05)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        kl.Phi("nope")
    with pytest.raises(kl.HypothesisNotMet):
        kl.Kernel("bspline:s=2")
    with pytest.raises(kl.HypothesisNotMet):
        kl.moment(kl.Kernel("sigma_theta:theta=3"), 2.0)
