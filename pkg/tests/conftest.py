import numpy as np
import pytest

from latentgfl.decoder import DecoderParams, init_decoder

ACCEPTANCE_LINES = []


def random_decoder(rng, d=3, hidden=(8, 8), n=16, bias_scale=0.3):
    p = init_decoder(d, hidden, n, rng)
    return p.map(lambda a: a + bias_scale * rng.standard_normal(a.shape))


def linear_decoder(W, b):
    """ReLU network that computes exactly ``W z + b`` via relu(z) - relu(-z)."""
    n, d = W.shape
    eye = np.eye(d)
    W1 = np.vstack([eye, -eye])
    W2 = np.block([[eye, -eye], [-eye, eye]])
    W3 = np.hstack([W, -W])
    return DecoderParams(W1=W1, b1=np.zeros(2 * d), W2=W2, b2=np.zeros(2 * d), W3=W3, b3=b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def report(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
