import numpy as np
import pytest

from pqc.channels import KrausChannel
from pqc.densmat import haar_random_unitary

_ACCEPTANCE = []


def record(criterion: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density_matrix(dim, rng, rank=None):
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_pure(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_channel(dim, n_kraus, seed):
    """CPTP map from the first ``dim`` columns of a Haar unitary on ``n_kraus * dim``."""
    u = haar_random_unitary(dim * n_kraus, seed)
    return KrausChannel(u[:, :dim].reshape(n_kraus, dim, dim))


def brute_force_costs(target_ops, candidate_ops, states):
    """Trace distances between two channel outputs on pure ``states``; plain Kraus sums."""

    def out(ops):
        phi = np.einsum("aij,nj->nai", ops, states)
        return np.matmul(phi.transpose(0, 2, 1), phi.conj())

    diff = out(np.asarray(target_ops)) - out(np.asarray(candidate_ops))
    return 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=1)


def haar_states(n, dim, rng):
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
