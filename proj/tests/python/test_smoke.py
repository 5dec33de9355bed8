import json
import math

import pytest

besovinv = pytest.importorskip("besovinv")


def haar_prior(s=1.2, q=1.5, kappa=1.0, dim=1):
    basis = besovinv.BasisSpec(besovinv.BasisFamily.HaarPeriodic, dim)
    return besovinv.PriorParams(s, q, kappa, dim, basis)


def test_prior_draws_are_deterministic():
    p = haar_prior()
    a = besovinv.sample_prior(p, 64, 123)
    b = besovinv.sample_prior(p, 64, 123)
    c = besovinv.sample_prior(p, 64, 124)
    assert a == b
    assert a != c
    assert len(a) == 64


def test_weights_and_norms():
    p = haar_prior(s=1.0, q=2.0, kappa=1.0)
    assert besovinv.coefficient_weight(4, p) == pytest.approx(0.25)
    u = [1.0, 0.5, 1.0 / 3.0, 0.25]
    expect = math.sqrt(1.0 + 0.5 + 1.0 / 3.0 + 0.25)
    assert besovinv.norm_Xtq(u, 0.5, 2.0, 1) == pytest.approx(expect)
    assert besovinv.log_prior_density([0.0, 0.0], p) == 0.0


def test_synthesize_analyze_round_trip():
    basis = besovinv.BasisSpec(besovinv.BasisFamily.HaarPeriodic, 1)
    coefs = [0.7, -0.3, 0.2, 0.1, 0.0, 0.05, -0.4, 0.9]
    f = besovinv.synthesize(coefs, basis, 32)
    back = besovinv.analyze(f, basis, 8)
    assert back == pytest.approx(coefs, abs=1e-12)


def test_elliptic_solve_and_observe():
    n = 64
    prob = besovinv.EllipticProblem.zero_source(1, n)
    tp = 2.0 * math.pi
    prob.f.values = [tp * tp * math.sin(tp * (i + 0.5) / n) for i in range(n)]
    u = besovinv.GridFunction(1, n)  # log-diffusion u = 0 gives p = sin(2 pi x)
    pfield = besovinv.solve_elliptic(u, prob)
    assert pfield.mean() == pytest.approx(0.0, abs=1e-10)
    obs = besovinv.ObservationSetup.iso(1, [(0.25, 0.0, 0.0)], 0.1)
    (val,) = besovinv.observe(pfield, obs)
    assert val == pytest.approx(1.0, abs=5e-3)


def test_short_chain_runs():
    p = haar_prior()
    n = 32
    prob = besovinv.EllipticProblem.zero_source(1, n)
    tp = 2.0 * math.pi
    prob.f.values = [tp * tp * math.sin(tp * (i + 0.5) / n) for i in range(n)]
    obs = besovinv.ObservationSetup.iso(1, [(0.25, 0.0, 0.0), (0.75, 0.0, 0.0)], 0.5)
    obs.y = [0.4, -0.4]
    chain = besovinv.run_chain_elliptic(p, 16, prob, obs, 200, 0.3, 4, 7)
    assert len(chain.samples) == 50
    assert 0.0 <= chain.acceptance_rate <= 1.0


def test_run_experiment_writes_artifacts(tmp_path):
    cfg = {
        "experiment": "sample-prior",
        "seed": 11,
        "prior": {"s": 1.2, "q": 1.5, "kappa": 1.0, "dim": 1, "basis": "haar"},
        "N": 64,
        "n_samples": 4,
    }
    out = besovinv.run_experiment(json.dumps(cfg), str(tmp_path))
    outdir = tmp_path
    assert (outdir / "manifest.json").exists()
    assert (outdir / "coefficients.csv").exists()
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["experiment"] == "sample-prior"
    assert out == str(outdir)
