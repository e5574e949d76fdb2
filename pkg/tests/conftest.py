import numpy as np
import pytest


def naive_mgs(a):
    """Textbook modified Gram-Schmidt on all columns at once."""
    a = np.array(a, dtype=float)
    m, p = a.shape
    q = a.copy()
    r = np.zeros((p, p))
    for j in range(p):
        for i in range(j):
            r[i, j] = q[:, i] @ q[:, j]
            q[:, j] -= r[i, j] * q[:, i]
        r[j, j] = np.linalg.norm(q[:, j])
        q[:, j] /= r[j, j]
    return q, r


def naive_omp(phi, y, k, eps):
    """OMP with a full least-squares solve over the whole support each step."""
    support = []
    r = y.copy()
    coef = np.zeros(0)
    while np.linalg.norm(r) > eps and len(support) < k:
        c = np.abs(phi.T @ r)
        c[support] = -1.0
        support.append(int(np.argmax(c)))
        coef = np.linalg.pinv(phi[:, support]) @ y
        r = y - phi[:, support] @ coef
    x = np.zeros(phi.shape[1])
    x[support] = coef
    return x


def naive_cosamp(phi, y, s, max_iter, eps):
    """Reference CoSaMP using pinv on each merged support (no halting on stagnation
    other than the residual test), with the non-decrease guard of the library."""
    n = phi.shape[1]
    a = np.zeros(n)
    v = y.copy()
    for _ in range(max_iter):
        if np.linalg.norm(v) <= eps:
            break
        u = phi.T @ v
        omega = np.argsort(-np.abs(u), kind="stable")[:2 * s]
        t = np.union1d(omega, np.flatnonzero(a))
        b = np.zeros(n)
        b[t] = np.linalg.pinv(phi[:, t]) @ y
        keep = np.argsort(-np.abs(b), kind="stable")[:s]
        a_new = np.zeros(n)
        a_new[keep] = b[keep]
        v_new = y - phi @ a_new
        if np.linalg.norm(v_new) >= np.linalg.norm(v):
            break
        a, v = a_new, v_new
    return a


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
