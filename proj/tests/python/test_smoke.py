"""Smoke tests for the python bindings: each main operation is exercised
once with a small input; numerical depth lives in the C++ suites."""

import math

import numpy as np
import pytest

import tcstruct as tc


def test_version():
    assert tc.__version__


def test_render_scene_and_orb():
    params = tc.SceneParams()
    geom = tc.GridGeom(100.0, 4.0)
    img = tc.render_scene(params, geom)
    temps = img.temps
    assert temps.shape == (51, 51)
    assert temps.dtype == np.float32
    assert np.all(temps >= 150.0) and np.all(temps <= 340.0)

    cfg = tc.OrbConfig()
    cfg.r_max_km = 100.0
    mean = tc.radial_profile(img, tc.RadialStat.MEAN, cfg)
    assert mean.values.shape == (25,)
    # eye plateau
    assert mean.values[0] == pytest.approx(params.eye_temp_k)

    level = tc.levelset_area(img, cfg)
    vals = level.values
    assert np.all(np.diff(vals) >= 0.0)
    assert vals[0] >= 0.0 and vals[-1] <= 1.0

    vec = tc.assemble_orb_vector(img, cfg)
    assert vec.layout.d == 25 + 25 + 25 + 66
    assert vec.values.shape == (vec.layout.d,)


def test_default_layout_dimension():
    layout = tc.orb_layout(tc.OrbConfig())
    assert layout.d == 366
    assert [c.offset for c in layout.components] == [0, 100, 200, 300]


def test_hurdat2_round_trip():
    text = (
        "AL092011,             IRENE,      2,\n"
        "20110821, 0000,  , TS, 15.0N,  59.0W,  45, 1011,\n"
        "20110821, 0600,  , TS, 16.0N,  60.0W,  50, 1009,\n"
    )
    result = tc.parse_hurdat2(text)
    assert not result.rejected
    (track,) = result.tracks
    assert track.storm_id == "AL092011"
    assert track.fixes[0].lon == -59.0
    again = tc.parse_hurdat2(tc.format_hurdat2([track]))
    assert again.tracks[0].fixes[1].vmax == 50.0

    center = tc.interpolate_center(track, tc.UtcTime("2011-08-21T03:00:00Z"))
    assert center.lat == pytest.approx(15.5)


def test_pca_round_trip():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 8))
    basis = tc.fit_pca(X, fixed_k=8)
    x = X[4]
    z = tc.pca_project(basis, x)
    back = tc.pca_reconstruct(basis, z)
    assert np.allclose(back, x, atol=1e-8)
    assert basis.k() == 8


def test_var_forecast():
    # Three sequences from distinct starts make the diagonal map identifiable.
    A = np.diag([0.8, 0.6, -0.5])
    sequences = []
    for start in np.eye(3):
        z = start.copy()
        rows = []
        for _ in range(30):
            rows.append(z.copy())
            z = A @ z
        sequences.append(np.asarray(rows))
    model = tc.fit_var(sequences, order=1, ridge=0.0)
    assert np.allclose(model.coeffs[0], A, atol=1e-6)
    fc = tc.forecast_var(model, sequences[0], steps=3)
    assert fc.shape == (3, 3)


def test_gam_and_lasso():
    rng = np.random.default_rng(7)
    X = np.column_stack([rng.uniform(40, 90, 200), rng.uniform(-3, 3, 200)])
    y = 0.5 * X[:, 1] - 0.02 * (X[:, 0] - 60.0)
    gam = tc.fit_gam(X, y, knots_per_feature=8, penalty=1e-6)
    v_hat = tc.predict_intensity(gam, X[0])
    assert 0.0 <= v_hat <= 250.0
    assert abs(gam.predict_change(X[0]) - y[0]) < 0.2

    labels = [bool(v) for v in (X[:, 1] + rng.normal(0, 0.5, 200) > 0)]
    lam_max = tc.lasso_lambda_max(X, labels)
    model = tc.fit_logistic_lasso(X, labels, lambda_=2.0 * lam_max)
    assert model.n_nonzero() == 0
    p = tc.predict_ri(model, X[0])
    assert 0.0 <= p <= 1.0


def test_analogs_and_clustering():
    rng = np.random.default_rng(11)
    windows = []
    for i in range(12):
        w = tc.TrajWindow()
        w.storm_id = f"SY{i:02d}2020"
        w.start = tc.UtcTime(0)
        w.coeffs = rng.normal(40.0 * (i % 2), 1.0, size=(5, 3))
        windows.append(w)
    n = len(windows)
    distances = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = tc.trajectory_distance(windows[i].coeffs, windows[j].coeffs)
            distances[i, j] = distances[j, i] = d
    result = tc.spectral_cluster(distances, k_clusters=2, seed=5)
    labels = np.asarray(result.labels)
    parity = np.arange(n) % 2
    assert (labels == labels[0]).sum() == 6
    assert len(set(zip(labels.tolist(), parity.tolist()))) == 2  # consistent split

    matches = tc.find_analogs(windows[0], windows, top_m=3)
    assert [m.storm_id for m in matches]
    assert all(m.storm_id != windows[0].storm_id for m in matches)


def test_simulate_and_label(tmp_path):
    config = tc.StormSimConfig()
    config.steps = 12
    steps = tc.simulate_storm(config, tc.GridGeom(120.0, 4.0), seed=5)
    assert len(steps) == 12
    assert all(15.0 <= s.vmax <= 185.0 for s in steps)

    lib = tc.LibraryConfig()
    lib.n_storms = 2
    lib.geom = tc.GridGeom(120.0, 4.0)
    regimes = tc.default_regimes()
    for r in regimes:
        r.steps = 8
    lib.regimes = regimes
    paths = tc.generate_library(lib, tmp_path / "lib")
    tracks = tc.parse_hurdat2_file(str(paths.hurdat2))
    assert len(tracks.tracks) == 2
    label = tc.label_rapid_change(tracks.tracks[0], tracks.tracks[0].fixes[0].time)
    assert label is None or isinstance(label, bool)

    frames = tc.read_ir_stack(paths.storms[0].manifest)
    assert len(frames) == 8
    samples, summary = tc.build_samples(frames, tracks.tracks[0], geom=tc.GridGeom(120.0, 4.0))
    assert summary.emitted == len(samples) > 0
    assert samples[0].time.secs % (6 * 3600) == 0


def test_run_pipeline(tmp_path):
    config = tc.RunConfig()
    config.synth_n_storms = 8
    config.synth_steps = 14
    config.grid = tc.GridGeom(120.0, 4.0)
    config.orb.r_max_km = 120.0
    config.horizons_hours = [6]
    config.pathway_a_enabled = False
    config.plots = False
    config.seed = 7
    out = tmp_path / "run"
    tc.run_pipeline(config, out)
    assert (out / "DONE").exists()
    header = (out / "reports" / "metrics_intensity.csv").read_text().splitlines()[0]
    assert header.startswith("horizon_hours,model,n,rmse_kt")


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        tc.fit_pca(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        tc.UtcTime("not-a-time")
