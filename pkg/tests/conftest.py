import json
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"
EPS = np.finfo(np.float64).eps


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def well_conditioned_upper(rng, m):
    """Upper triangular with diagonal in [1, 2] and small off-diagonal entries."""
    U = np.triu(crandn(rng, m, m)) / np.sqrt(m)
    U[np.diag_indices(m)] = 1 + rng.random(m)
    return np.asfortranarray(U)


def column_residuals(U, lam, X, B, s=None, V=None):
    """``||(U - lam_j V) x_j - s_j b_j||_inf / ((||U|| + |lam_j| ||V||) ||x_j||_inf)``."""
    U = np.triu(U)
    V = np.eye(U.shape[0]) if V is None else np.triu(V)
    s = np.ones(X.shape[1]) if s is None else s
    nu = np.abs(U).sum(axis=1).max()
    nv = np.abs(V).sum(axis=1).max()
    out = []
    for j in range(X.shape[1]):
        r = (U - lam[j] * V) @ X[:, j] - s[j] * B[:, j]
        den = (nu + abs(lam[j]) * nv) * np.abs(X[:, j]).max()
        out.append(np.abs(r).max() / den)
    return np.array(out)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(capsys):
    """``criterion(n, title, ok, detail)`` prints one pass/fail line and asserts."""

    def report(n, title, ok, detail=""):
        line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
