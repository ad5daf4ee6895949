import numpy as np
import pytest

from corrmax import kernels


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    fn = kernels.available_backends()[request.param]
    monkeypatch.setattr(kernels, "max_abs_offdiag", fn)
    monkeypatch.setattr(kernels, "BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def brute_force_max(x):
    """O(n p^2) double loop over the textbook Pearson formula."""
    x = np.asarray(x, dtype=float)
    n, p = x.shape
    best, pair = -1.0, None
    for i in range(p):
        for j in range(i + 1, p):
            a = x[:, i] - x[:, i].mean()
            b = x[:, j] - x[:, j].mean()
            r = abs(sum(a[k] * b[k] for k in range(n))) / (
                np.sqrt(sum(v * v for v in a)) * np.sqrt(sum(v * v for v in b))
            )
            if r > best:
                best, pair = r, (i, j)
    return best, pair


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
