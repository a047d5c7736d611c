"""
Plain-text CSV matrices and vectors.

Matrices: one row per line, comma-separated, with an optional leading
"# M N" comment giving the shape. Vectors: one value per line.
"""
import logging
import os

import numpy as np

from pybrex.exceptions import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def write_matrix(path, A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    np.savetxt(path, A, fmt=FLOAT_FORMAT, delimiter=",", header=f"{A.shape[0]} {A.shape[1]}", comments="# ")


def read_matrix(path):
    if not os.path.exists(path):
        raise ConfigError(f"matrix file not found: {path}")
    shape = None
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    if first.startswith("#"):
        parts = first.lstrip("#").split()
        if len(parts) == 2 and all(p.isdigit() for p in parts):
            shape = (int(parts[0]), int(parts[1]))
    try:
        A = np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#", dtype=float, ndmin=2))
    except ValueError as e:
        raise ConfigError(f"malformed matrix file {path}: {e}") from e
    if shape is not None and A.shape != shape:
        raise ConfigError(f"{path} declares shape {shape} but holds {A.shape}")
    return A


def write_vector(path, v):
    np.savetxt(path, np.asarray(v, dtype=float).ravel(), fmt=FLOAT_FORMAT)


def read_vector(path):
    if not os.path.exists(path):
        raise ConfigError(f"vector file not found: {path}")
    try:
        return np.loadtxt(path, comments="#", dtype=float, ndmin=1)
    except ValueError as e:
        raise ConfigError(f"malformed vector file {path}: {e}") from e
