import json

import pytest

import pseudorot as pr


def test_translation_rotation_vector():
    t = pr.Map.translation_exact("3/10", "7/10")
    (rho, residual) = pr.rotation_vector(t, samples=4, N=50)
    assert abs(rho[0] - 0.3) < 1e-12
    assert abs(rho[1] - 0.7) < 1e-12
    assert residual < 1e-12


def test_serialize_roundtrip_and_evaluate():
    t = pr.Map.translation(0.25, 0.5)
    text = t.serialize()
    back = pr.Map.deserialize(text)
    assert back.evaluate(0.5, 0.75) == pytest.approx((0.75, 0.25))
    assert back.serialize() == text


def test_composition_and_inverse():
    f = pr.Map.translation_exact("1/4", "0")
    g = pr.Map.translation_exact("0", "1/8")
    fg = f.after(g)
    assert fg.evaluate(0.0, 0.0) == pytest.approx((0.25, 0.125))
    assert fg.after(fg.inverse()).evaluate(0.3, 0.4) == pytest.approx((0.3, 0.4))
    assert fg.isotopic_to_identity()


def test_stage_one_counterexample():
    out = pr.build_counterexample(1)
    assert out["all_pass"]
    report = json.loads(out["report"])
    assert report["all_pass"] is True
    (rho, _) = pr.rotation_vector(out["map"], samples=4, N=100)
    assert rho[0] == pytest.approx(0.01, abs=1e-9)
    assert rho[1] == pytest.approx(0.1, abs=1e-9)


def test_budget_refusal():
    with pytest.raises(pr.BudgetExceededError):
        pr.build_counterexample(99)


def test_centralizer_helpers():
    f = pr.Map.translation_exact("1/100", "1/10")
    g = pr.Map.translation_exact("2/5", "1/10")
    defect, commutes = pr.commutator_defect(f, g, grid=8)
    assert commutes and defect <= 1e-12
    out = pr.uniform_bound(f, 0.0, g, N=5, grid=8)
    assert out["pass"]
    assert out["csv"].startswith("n,spread\n")
    (phi, err) = pr.rotation_homomorphism(g, grid=16)
    assert phi == pytest.approx((0.4, 0.1), abs=1e-9)
    assert err < 1e-6


def test_c0_bound_tiny_translation():
    t = pr.Map.translation(1e-6, 0.0)
    out = pr.c0_bound(t, kappa=0.0, grid=16)
    assert out["pass"]
