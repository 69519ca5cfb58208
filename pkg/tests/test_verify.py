import pytest

from mnbesov.errors import ConfigError
from mnbesov.verify import SUITES, VerifyConfig, run_verify


def summary(report):
    return {s.name: (s.passed, len(s.checks), len(s.skipped)) for s in report.suites}


def test_default_run_passes():
    report = run_verify(VerifyConfig())
    assert report.passed, report.failing()
    assert {s.name for s in report.suites} == set(SUITES)
    assert report.constants["C_B"] == 1.5
    assert report.constants["K_hat"] > 0
    assert report.constants["epsilon"] == pytest.approx(0.5 / (4 * report.constants["K_hat"]))


def test_parallel_matches_serial():
    cfg = VerifyConfig(suites="field_grid,mixed_lebesgue,besov_norms", samples=5)
    assert summary(run_verify(cfg)) == summary(run_verify(cfg, parallel=True))


@pytest.mark.parametrize("values", [
    {"n2d": ""},
    {"n3d": "abc"},
    {"samples": "0"},
    {"nt": "2"},
    {"p": "2,0.5"},
    {"solver_flavor": "sobolev"},
    {"colour": "blue"},
])
def test_bad_config(values):
    with pytest.raises(ConfigError):
        VerifyConfig.from_mapping(values).validate()


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_verify(VerifyConfig(suites="field_grid,nope"))


def test_off_critical_solver_is_skipped_with_reason():
    cfg = VerifyConfig(suites="mild_solver", bilinear_sigma_offset=1.0, solver_runs=1, nt=16)
    report = run_verify(cfg)
    (suite,) = report.suites
    assert suite.passed and suite.error is None
    assert suite.skipped and suite.skipped[0]["reason"]


def test_same_seed_same_report():
    cfg = VerifyConfig(suites="paraproduct,littlewood_paley", seed=11, samples=4)
    a = run_verify(cfg).as_dict()
    b = run_verify(cfg).as_dict()
    for key in ("environment",):
        a.pop(key), b.pop(key)
    assert a == b
