import numpy as np
import pytest

from conftest import AL_DENSITY, AL_MODULUS, make_beam
from weakbeam.discovery import discover, render_pde
from weakbeam.grid import FieldGrid
from weakbeam.weakform import TestFunctionBasis, default_library


# ------------------------------------------------------------------ rendering

def test_render_empty_model():
    assert render_pde("w_tt", ("w_x", "w"), [0.0, 0.0]) == "w_tt = 0"


def test_render_single_negative_term():
    text = render_pde("w_tt", ("w_xxxx",), [-58.5218])
    assert text == "w_tt = -58.5218 w_xxxx"


def test_render_sign_joining():
    text = render_pde("w_tt", ("w_x", "w"), [1.5, -2.0])
    assert text == "w_tt = 1.5 w_x - 2 w"
    text = render_pde("w_tt", ("w_x", "w"), [-1.5, 2.0])
    assert text == "w_tt = -1.5 w_x + 2 w"


def test_render_bare_constant():
    assert render_pde("w_tt", ("1",), [-3.5]) == "w_tt = -3.5"


def test_render_sig_figs():
    assert render_pde("w_t", ("w",), [np.pi], sig_figs=3) == "w_t = 3.14 w"
    assert render_pde("w_t", ("w",), [np.pi], sig_figs=8) == "w_t = 3.1415927 w"


def test_render_skips_zeros_between_terms():
    text = render_pde("w_tt", ("w_x", "w_xx", "w"), [1.0, 0.0, -1.0])
    assert text == "w_tt = 1 w_x - 1 w"


# ----------------------------------------------------------------- discovery

def test_discovery_on_clean_beam_data(edge_field):
    result = discover(edge_field)
    assert result.support == ("w_xxxx",)
    alpha = -result.coefficient("w_xxxx")
    beam = make_beam()
    want = AL_MODULUS * beam.section.second_moment / (AL_DENSITY * beam.section.area)
    assert alpha == pytest.approx(want, rel=1e-2)
    assert result.pde_text.startswith("w_tt = -")
    assert result.pde_text.endswith("w_xxxx")


def test_discovery_result_accessors(edge_field):
    result = discover(edge_field)
    assert result.term_names == default_library().term_names
    assert result.coefficient("w_x") == 0.0  # inactive term reads as zero
    with pytest.raises(KeyError):
        result.coefficient("w_xxxxx")
    assert result.lambda_hat > 0
    assert 0 <= result.relative_residual < 1
    assert result.condition_number >= 1.0
    gw, gx, gt = result.gammas
    assert gw == pytest.approx(1.0 / np.abs(edge_field.values).max(), rel=1e-12)
    assert gx > 0 and gt > 0


def test_discovery_report_is_json_ready(edge_field):
    import json

    result = discover(edge_field)
    report = result.as_report()
    assert set(report) == {
        "pde",
        "terms",
        "coefficients",
        "coefficients_scaled",
        "support",
        "lambda_hat",
        "relative_residual",
        "condition_number",
        "n_queries",
        "gamma",
        "basis",
        "corner",
    }
    assert report["support"] == ["w_xxxx"]
    assert report["terms"] == list(default_library().term_names)
    assert report["corner"]["x"] is not None and report["corner"]["t"] is not None
    parsed = json.loads(json.dumps(report))
    assert parsed["basis"]["m_x"] == result.basis.m_x


def test_discovery_with_explicit_basis_skips_corners(edge_field):
    basis = TestFunctionBasis(p_x=8, p_t=7, m_x=40, m_t=60, s_x=5, s_t=40)
    result = discover(edge_field, basis=basis)
    assert result.basis == basis
    assert result.corner_x is None and result.corner_t is None
    assert result.as_report()["corner"] == {"x": None, "t": None}


def test_discovery_rejects_identically_zero_field():
    from weakbeam.errors import DegenerateDataError

    g = FieldGrid(np.arange(40) * 1e-3, np.arange(60) * 1e-6, np.zeros((40, 60)))
    basis = TestFunctionBasis(p_x=8, p_t=7, m_x=10, m_t=15, s_x=2, s_t=3)
    with pytest.raises(DegenerateDataError):
        discover(g, basis=basis)
