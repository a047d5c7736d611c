"""
Unit tests for the CSV matrix and vector files.
"""
import numpy as np
import pytest

from pybrex.exceptions import ConfigError
from pybrex.harness.matrix_io import read_matrix, read_vector, write_matrix, write_vector


@pytest.mark.unit
class TestMatrixFiles:

    def test_write_and_read(self, tmp_path):
        path = str(tmp_path / "A.csv")
        A = np.array([[1.0, 0.1], [1 / 3, -2.5e-17], [4.0, 5.0]])
        write_matrix(path, A)
        with open(path) as fh:
            assert fh.readline().strip() == "# 3 2"
        np.testing.assert_array_equal(read_matrix(path), A)

    def test_shape_header_mismatch(self, tmp_path):
        path = tmp_path / "A.csv"
        path.write_text("# 2 3\n1,2\n3,4\n")
        with pytest.raises(ConfigError):
            read_matrix(str(path))

    def test_headerless(self, tmp_path):
        path = tmp_path / "A.csv"
        path.write_text("1,2\n3,4\n")
        np.testing.assert_array_equal(read_matrix(str(path)), [[1.0, 2.0], [3.0, 4.0]])

    def test_malformed(self, tmp_path):
        path = tmp_path / "A.csv"
        path.write_text("1,a\n3,4\n")
        with pytest.raises(ConfigError):
            read_matrix(str(path))

    def test_missing(self, tmp_path):
        with pytest.raises(ConfigError):
            read_matrix(str(tmp_path / "absent.csv"))


@pytest.mark.unit
class TestVectorFiles:

    def test_write_and_read(self, tmp_path):
        path = str(tmp_path / "y.csv")
        write_vector(path, [0.1, 2.0, -3.5])
        np.testing.assert_array_equal(read_vector(path), [0.1, 2.0, -3.5])

    def test_single_value(self, tmp_path):
        path = str(tmp_path / "y.csv")
        write_vector(path, [7.0])
        assert read_vector(path).shape == (1,)

    def test_missing_and_malformed(self, tmp_path):
        with pytest.raises(ConfigError):
            read_vector(str(tmp_path / "absent.csv"))
        path = tmp_path / "bad.csv"
        path.write_text("1.0\nx\n")
        with pytest.raises(ConfigError):
            read_vector(str(path))
