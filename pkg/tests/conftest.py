from bergkern.models.families import BallParams, CnParams, DnmParams, VEtaParams
import numpy as np
import pytest


def assert_psd(gram: np.ndarray, rel: float = 1e-8) -> None:
    """Smallest eigenvalue of the Hermitian part is at least -rel times the largest."""
    eigenvalues = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    assert eigenvalues.min() >= -rel * np.abs(eigenvalues).max()


@pytest.fixture
def fock():
    return CnParams(n=1, mu1=1.0, mu2=2.0)


@pytest.fixture
def disc():
    return BallParams(n=1)


@pytest.fixture
def dnm():
    return DnmParams(n=1, m=1, mu1=1.0, mu2=2.0, eta=0.0)


@pytest.fixture
def veta():
    return VEtaParams(n=1, m=1, eta=(1.0,), a=0.0)


ALL_FAMILIES = [
    CnParams(n=1, mu1=1.0, mu2=2.0),
    CnParams(n=2, mu1=0.5, mu2=3.0),
    DnmParams(n=1, m=1, mu1=1.0, mu2=2.0, eta=0.5),
    VEtaParams(n=1, m=1, eta=(1.0,), a=1.0),
    BallParams(n=2, a=1.0, radius=2.0),
]
