import numpy as np
import pytest
from dataclasses import replace

from ghostphase import (ArtifactContext, ObjectSpec, closed_form_gi, combine_phase,
                        decompose, denoise, disc_mask, estimate_spectrum, ghost_image,
                        hadamard_matrix, make_object, measure_exact, normalize,
                        phase_pearson, phase_rmse, random_basis, remove_artifact,
                        sample_counts)
from ghostphase.reconstruction import PhaseImage
from ghostphase.analysis import wrap

from conftest import random_complex_object

ALL_KINDS = ["flat", "double-slit-amplitude", "annulus-amplitude",
             "pi-slit-phase", "azimuthal-ring-phase", "spiral-flower-phase"]


def _object(kind, d):
    radii = (d / 4, 3 * d / 8) if d >= 8 else (1.0, 2.2)
    return make_object(ObjectSpec(kind=kind, annulus_radii=radii), d)


def test_flat_cos_series_structure():
    H = hadamard_matrix(8)
    gi = ghost_image(measure_exact(make_object(ObjectSpec(kind="flat"), 8), H, "cos"), H)
    body = gi.entries.ravel()[1:]
    assert body.max() - body.min() < 1e-13
    assert abs(gi.entries[0, 0] - body[0]) > 1e-6


def test_constant_series_gives_zero_image():
    H = hadamard_matrix(8)
    series = measure_exact(make_object(ObjectSpec(kind="flat"), 8), H, "cos")
    series = replace(series, values=np.full(64, 0.37))
    np.testing.assert_allclose(ghost_image(series, H).entries, 0, atol=1e-15)


@pytest.mark.parametrize("kind", ["cos", "sin"])
@pytest.mark.parametrize("object_kind", ALL_KINDS)
@pytest.mark.parametrize("d", [4, 8, 16])
def test_closed_form_equivalence(kind, object_kind, d):
    H = hadamard_matrix(d)
    obj = _object(object_kind, d)
    gi = ghost_image(measure_exact(obj, H, kind), H)
    cf, _ = closed_form_gi(obj, H, kind)
    assert np.max(np.abs(gi.entries - cf.entries)) <= 1e-10


def test_reference_mode_independence():
    H = hadamard_matrix(8)
    series = measure_exact(_object("pi-slit-phase", 8), H, "cos")
    shifted = replace(series, values=series.values + 0.7)
    np.testing.assert_allclose(ghost_image(series, H).entries,
                               ghost_image(shifted, H).entries, atol=1e-12)


def test_reconstruction_spectrum_is_mean_free():
    from ghostphase import fwht2
    H = hadamard_matrix(8)
    gi = ghost_image(measure_exact(_object("azimuthal-ring-phase", 8), H, "sin"), H)
    coeffs = fwht2(gi.entries, H)
    assert abs(coeffs.sum()) < 1e-12


def test_series_length_mismatch():
    H = hadamard_matrix(8)
    series = measure_exact(_object("flat", 8), H, "cos")
    with pytest.raises(ValueError):
        ghost_image(replace(series, values=series.values[:10]), hadamard_matrix(8))


def test_sin_term1_vanishes_for_real_objects():
    H = hadamard_matrix(8)
    obj = _object("double-slit-amplitude", 8)
    _, terms = closed_form_gi(obj, H, "sin")
    np.testing.assert_allclose(terms.object_part, 0, atol=1e-14)


def test_analytic_removal_proportional_to_object():
    d = 8
    H = hadamard_matrix(d)
    obj = _object("pi-slit-phase", d)
    dec = decompose(obj, H)
    gic = ghost_image(measure_exact(obj, H, "cos"), H)
    gis = ghost_image(measure_exact(obj, H, "sin"), H)
    re, im = remove_artifact(gic, gis, "analytic", ArtifactContext(basis=H, obj=obj))
    scale = np.sqrt(dec.reference_probability) / (d * d)
    rotated = np.exp(-1j * dec.reference_phase) * obj
    np.testing.assert_allclose(re, scale * rotated.real, atol=1e-10)
    np.testing.assert_allclose(im, scale * rotated.imag, atol=1e-10)


def test_analytic_requires_ground_truth():
    H = hadamard_matrix(4)
    obj = _object("flat", 4)
    gic = ghost_image(measure_exact(obj, H, "cos"), H)
    gis = ghost_image(measure_exact(obj, H, "sin"), H)
    with pytest.raises(ValueError):
        remove_artifact(gic, gis, "analytic", ArtifactContext(basis=H))


def test_heuristic_fallback_tames_corner():
    H = hadamard_matrix(16)
    obj = make_object(ObjectSpec(kind="flat"), 16)
    gic = ghost_image(measure_exact(obj, H, "cos"), H)
    gis = ghost_image(measure_exact(obj, H, "sin"), H)
    support = disc_mask(16, 7)
    re, im = remove_artifact(gic, gis, "heuristic", ArtifactContext(support=support))
    mad = np.median(np.abs(re - np.median(re))) + 1e-300
    assert abs(re[0, 0] - np.median(re)) < 3 * mad or abs(re[0, 0]) < 1e-12


def test_zero_images_stay_zero():
    from ghostphase.reconstruction import GhostImage
    zero = GhostImage(channel="cos", entries=np.zeros((8, 8)))
    re, im = remove_artifact(zero, replace(zero, channel="sin"), "heuristic",
                             ArtifactContext(support=np.ones((8, 8), bool)))
    np.testing.assert_allclose(re, 0, atol=1e-15)
    np.testing.assert_allclose(im, 0, atol=1e-15)


def test_estimate_spectrum_matches_truth():
    # valid regime: the uniform reference mode carries most of the energy
    H = hadamard_matrix(8)
    obj = normalize(1.0 + 0.25 * random_complex_object(8, seed=21))
    dec = decompose(obj, H)
    est = estimate_spectrum(measure_exact(obj, H, "cos"), measure_exact(obj, H, "sin"))
    assert est.p0 == pytest.approx(dec.reference_probability, abs=1e-12)
    np.testing.assert_allclose(est.probabilities, dec.probabilities, atol=1e-9)
    delta = dec.phases - dec.reference_phase
    cross = np.sqrt(dec.reference_probability * dec.probabilities)
    np.testing.assert_allclose(est.cross_cos, cross * np.cos(delta), atol=1e-9)
    np.testing.assert_allclose(est.cross_sin, cross * np.sin(delta), atol=1e-9)


def test_heuristic_equals_analytic_for_exact_hadamard_series():
    d = 16
    H = hadamard_matrix(d)
    obj = _object("azimuthal-ring-phase", d)
    sc = measure_exact(obj, H, "cos")
    ss = measure_exact(obj, H, "sin")
    gic, gis = ghost_image(sc, H), ghost_image(ss, H)
    re_a, im_a = remove_artifact(gic, gis, "analytic", ArtifactContext(basis=H, obj=obj))
    re_h, im_h = remove_artifact(gic, gis, "heuristic",
                                 ArtifactContext(basis=H, series_cos=sc, series_sin=ss))
    interior = np.ones((d, d), bool)
    interior[0, 0] = False
    np.testing.assert_allclose(re_h[interior], re_a[interior], atol=1e-10)
    np.testing.assert_allclose(im_h[interior], im_a[interior], atol=1e-10)


def test_combine_phase_basics():
    re = np.array([[1.0, 0.0], [0.0, 0.0]])
    im = np.array([[0.0, 1.0], [0.0, 0.0]])
    phase = combine_phase(re, im)
    assert phase.entries[0, 0] == pytest.approx(0.0)
    assert phase.entries[0, 1] == pytest.approx(np.pi / 2)
    assert not phase.support[1, 0]
    assert phase.entries[1, 0] == 0.0


def test_combine_phase_shape_mismatch():
    with pytest.raises(ValueError):
        combine_phase(np.zeros((4, 4)), np.zeros((8, 8)))


def test_ring_phase_recovered_exactly_analytic():
    d = 16
    H = hadamard_matrix(d)
    obj = _object("azimuthal-ring-phase", d)
    dec = decompose(obj, H)
    gic = ghost_image(measure_exact(obj, H, "cos"), H)
    gis = ghost_image(measure_exact(obj, H, "sin"), H)
    re, im = remove_artifact(gic, gis, "analytic", ArtifactContext(basis=H, obj=obj))
    phase = combine_phase(re, im, np.abs(obj) > 0)
    expected = wrap(np.angle(obj) - dec.reference_phase)
    np.testing.assert_allclose(wrap(phase.entries[phase.support] - expected[phase.support]),
                               0, atol=1e-8)


def test_global_phase_invariance_of_recovered_phase():
    d = 8
    H = hadamard_matrix(d)
    obj = _object("pi-slit-phase", d)

    def recover(o):
        gic = ghost_image(measure_exact(o, H, "cos"), H)
        gis = ghost_image(measure_exact(o, H, "sin"), H)
        re, im = remove_artifact(gic, gis, "analytic", ArtifactContext(basis=H, obj=o))
        return combine_phase(re, im, np.abs(o) > 0)

    a = recover(obj)
    b = recover(np.exp(1j * 1.234) * obj)
    assert phase_rmse(a, b) < 1e-8


def test_amplitude_object_phase_is_zero():
    d = 16
    H = hadamard_matrix(d)
    obj = _object("double-slit-amplitude", d)
    sc, ss = measure_exact(obj, H, "cos"), measure_exact(obj, H, "sin")
    re, im = remove_artifact(ghost_image(sc, H), ghost_image(ss, H), "heuristic",
                             ArtifactContext(basis=H, series_cos=sc, series_sin=ss))
    phase = combine_phase(re, im, np.abs(obj) > 0)
    assert np.abs(phase.entries[phase.support]).max() < 1e-6


def test_random_vs_hadamard_reconstruction_agreement():
    d = 16
    obj = _object("pi-slit-phase", d)
    H = hadamard_matrix(d)
    basis = random_basis(d * d, d, seed=42)
    support = disc_mask(d, 0.44 * d)

    def recover(b):
        sc, ss = measure_exact(obj, b, "cos"), measure_exact(obj, b, "sin")
        re, im = remove_artifact(ghost_image(sc, b), ghost_image(ss, b), "heuristic",
                                 ArtifactContext(basis=b, series_cos=sc, series_sin=ss))
        return denoise(combine_phase(re, im, support), 3)

    ph_h = recover(H)
    ph_r = recover(basis)
    assert phase_pearson(ph_h, ph_r) > 0.9
    assert phase_rmse(ph_r, ph_h) <= 0.3


def test_counts_normalization_preserves_structure():
    d = 8
    H = hadamard_matrix(d)
    obj = _object("pi-slit-phase", d)
    series = measure_exact(obj, H, "cos")
    noisy = sample_counts(series, 1e9, seed=3)
    exact_gi = ghost_image(series, H).entries
    noisy_gi = ghost_image(noisy, H).entries
    scale = np.linalg.norm(exact_gi) / np.linalg.norm(noisy_gi)
    assert np.corrcoef(exact_gi.ravel(), noisy_gi.ravel())[0, 1] > 0.999
    assert scale == pytest.approx(series.values.sum(), rel=1e-3)


def test_denoise_identity_and_validation():
    phase = PhaseImage(entries=np.zeros((8, 8)), support=np.ones((8, 8), bool))
    out = denoise(phase, 1)
    np.testing.assert_array_equal(out.entries, phase.entries)
    with pytest.raises(ValueError):
        denoise(phase, 4)


def test_denoise_removes_salt_and_pepper():
    d = 32
    rng = np.random.default_rng(0)
    entries = np.zeros((d, d))
    corrupted = rng.random((d, d)) < 0.05
    entries[corrupted] = np.pi
    phase = PhaseImage(entries=entries, support=np.ones((d, d), bool))
    out = denoise(phase, 3)
    assert np.mean(np.abs(out.entries) > 0.1) < 0.01


def test_denoise_all_invalid_is_noop():
    phase = PhaseImage(entries=np.full((4, 4), 0.5), support=np.zeros((4, 4), bool))
    out = denoise(phase, 3)
    np.testing.assert_array_equal(out.entries, phase.entries)
    assert not out.support.any()
