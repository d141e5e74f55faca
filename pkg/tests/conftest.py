import sys
import os
import numpy as np
import pytest

# Add the parent directory to Python path so we can import himdiag
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from himdiag.influence.schemas import DataMatrix


@pytest.fixture
def rng():
    """Seeded generator shared by a single test"""
    return np.random.default_rng(20240601)


@pytest.fixture
def random_data(rng):
    """Factory for Gaussian data with a linear signal on the first column"""
    def _make(n: int = 20, p: int = 5, signal: float = 1.0) -> DataMatrix:
        x = rng.standard_normal((n, p))
        y = signal * x[:, 0] + rng.standard_normal(n)
        return DataMatrix(x=x, y=y)
    return _make


@pytest.fixture
def binary_data(rng):
    """Factory for a noisy logistic data set with both classes present"""
    def _make(n: int = 40, p: int = 3, slope: float = 1.0) -> DataMatrix:
        x = rng.standard_normal((n, p))
        prob = 1.0 / (1.0 + np.exp(-slope * x[:, 0]))
        y = (rng.random(n) < prob).astype(float)
        y[:2] = (0.0, 1.0)
        return DataMatrix(x=x, y=y)
    return _make


@pytest.fixture
def write_matrix(tmp_path):
    """Write a matrix as CSV (optionally with a header) and return the path"""
    def _write(values: np.ndarray, header=None, name: str = "data.csv"):
        path = tmp_path / name
        np.savetxt(
            path,
            values,
            delimiter=",",
            fmt="%.17g",
            header=",".join(header) if header else "",
            comments="",
        )
        return path
    return _write
