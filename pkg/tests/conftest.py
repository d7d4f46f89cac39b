import numpy as np
import pytest

from mutsel.data import Dataset, make_synthetic


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Emit one [criterion-NN] PASS/FAIL line per acceptance test."""
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    line = "[criterion-%02d] %s" % (mark.args[0],
                                    "PASS" if report.passed else "FAIL")
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line(line)
    else:
        print(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_dataset():
    """60 samples, 3 features, cleanly separable."""
    return make_synthetic(n_samples=60, n_features=3, class_separation=3.0,
                          label_noise_rate=0.0, seed=7, name="small")


@pytest.fixture
def noisy_dataset():
    return make_synthetic(n_samples=80, n_features=4, class_separation=2.0,
                          label_noise_rate=0.1, seed=11, name="noisy")


@pytest.fixture
def xor_dataset():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    return Dataset(X, y, name="xor")


@pytest.fixture
def constant_dataset():
    """Constant features, balanced labels; every learner degenerates to
    the majority-tie classifier (class 0)."""
    return Dataset(np.zeros((10, 3)), np.array([0, 1] * 5), name="const")
