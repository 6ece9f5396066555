"""Acceptance suite: every primary criterion at its declared tolerance.

Each test prints one PASS/FAIL line per criterion clause (run pytest -s to see
them) and enforces the stated runtime budget on top of the numeric gates.
All runs are single-threaded and fully seeded.
"""
import time

import numpy as np
import pytest

from manistoch.experiments import (default_config, exp_density_moments,
                                   exp_flow_demo, exp_geometry_cert,
                                   exp_geometry_oracles, exp_maximal,
                                   exp_mollified_flow_convergence,
                                   exp_mollifier_norm_convergence,
                                   exp_quasi_invariance,
                                   exp_quasi_invariance_identity_control,
                                   exp_stability, exp_wong_zakai)

SEED = 20240808


def _report_lines(tag, rep, elapsed, budget):
    ok = True
    for name, v in rep.verdicts.items():
        line = "ACCEPTANCE %-18s %-36s %s" % (tag, name, "PASS" if v.passed else "FAIL")
        if v.observed is not None:
            line += "  (observed %.6g, tolerance %s)" % (v.observed, v.tolerance)
        print(line)
        ok &= v.passed
    print("ACCEPTANCE %-18s %-36s %s  (%.1fs of %ds budget)"
          % (tag, "runtime", "PASS" if elapsed < budget else "FAIL", elapsed, budget))
    return ok and elapsed < budget


def test_geometry_oracles():
    t0 = time.time()
    cfg = default_config("geometry-cert").with_updates(
        seed=SEED, params={"n_pairs": 1000})
    rep = exp_geometry_oracles(cfg)
    assert _report_lines("geometry", rep, time.time() - t0, 10)


def test_atlas_certification():
    t0 = time.time()
    cfg = default_config("geometry-cert").with_updates(
        seed=SEED, params={"n_pairs": 10_000})
    rep = exp_geometry_cert(cfg)
    assert _report_lines("atlas-cert", rep, time.time() - t0, 10)


def test_mollifier_convergence():
    t0 = time.time()
    rep = exp_mollifier_norm_convergence(default_config("mollify-conv")
                                         .with_updates(seed=SEED))
    assert _report_lines("mollifier", rep, time.time() - t0, 120)


def test_maximal_functions():
    t0 = time.time()
    rep = exp_maximal(default_config("maximal").with_updates(seed=SEED))
    assert _report_lines("maximal", rep, time.time() - t0, 120)


def test_flow_integrator():
    t0 = time.time()
    rep = exp_flow_demo(default_config("flow-demo").with_updates(seed=SEED))
    assert _report_lines("flow", rep, time.time() - t0, 60)


def test_wong_zakai():
    t0 = time.time()
    rep = exp_wong_zakai(default_config("wz-conv").with_updates(seed=SEED))
    assert _report_lines("wong-zakai", rep, time.time() - t0, 180)


def test_quasi_invariance():
    t0 = time.time()
    rep = exp_quasi_invariance(default_config("quasi-invariance")
                               .with_updates(seed=SEED))
    ok = _report_lines("quasi-inv", rep, time.time() - t0, 300)
    t1 = time.time()
    ctrl = exp_quasi_invariance_identity_control(
        default_config("quasi-invariance").with_updates(seed=SEED))
    ok &= _report_lines("quasi-inv-ctrl", ctrl, time.time() - t1, 60)
    assert ok


def test_density_moments():
    t0 = time.time()
    rep = exp_density_moments(default_config("density-moments")
                              .with_updates(seed=SEED))
    assert _report_lines("density", rep, time.time() - t0, 120)


def test_stability_estimate():
    t0 = time.time()
    rep = exp_stability(default_config("stability").with_updates(seed=SEED))
    assert _report_lines("stability", rep, time.time() - t0, 300)


def test_mollified_flow_cauchy():
    t0 = time.time()
    rep = exp_mollified_flow_convergence(default_config("mollify-conv")
                                         .with_updates(seed=SEED))
    assert _report_lines("flow-cauchy", rep, time.time() - t0, 300)
