import numpy as np
import pytest

from qsep.state import make_pure_state, random_unitary

PROFILES = [(2, 2, 2), (2, 2, 3), (2, 3, 4), (2, 2, 2, 2)]


@pytest.fixture(params=PROFILES, ids=lambda d: "x".join(map(str, d)))
def dims(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def orthonormal_pair(x, y):
    """Gram-Schmidt ``y`` against unit ``x``."""
    x = x / np.linalg.norm(x)
    y = y - np.vdot(x, y) * x
    return x, y / np.linalg.norm(y)


def rotated_span(a, b, dims, seed):
    """Random orthonormal basis of span(a, b) as two pure states."""
    q, _ = np.linalg.qr(np.stack([a, b], 1))
    basis = q @ random_unitary(2, seed)
    return make_pure_state(basis[:, 0], dims), make_pure_state(basis[:, 1], dims)


def write_json(path, obj):
    import json
    path.write_text(json.dumps(obj))
    return str(path)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(test_acceptance.RESULTS[n])
