"""
Seeded synthetic instances y = A x* + eps (least squares) and y ~ Poisson(A x* + b) (KL).
"""
import logging
import math
import os
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from pybrex.exceptions import ConfigError
from pybrex.harness.configmanager import ConfigManager
from pybrex.harness.matrix_io import read_matrix, read_vector, write_matrix, write_vector

logger = logging.getLogger(__name__)

FIDELITIES = ("ls", "kl")
NOISES = ("gaussian", "poisson", "none")
ENSEMBLES = ("gaussian_iid", "file")


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def trial_seeds(seed, trials):
    """Independent per-trial seeds spawned from one root seed."""
    children = np.random.SeedSequence(int(seed)).spawn(int(trials))
    return [int(child.generate_state(1, np.uint64)[0]) for child in children]


@dataclass(frozen=True)
class InstanceSpec:
    N: int
    M: int
    k_star: int
    fidelity: str = "ls"
    a_min: float = 1.0
    a_max: float = 2.0
    noise: str = "gaussian"
    sigma: float = 0.0
    background: float = 1.0
    ensemble: str = "gaussian_iid"
    matrix_path: Optional[str] = None
    normalize_columns: Optional[float] = None
    seed: int = 0

    def validate(self):
        if self.N < 1 or self.M < 1:
            raise ConfigError(f"need N >= 1 and M >= 1, got N={self.N}, M={self.M}")
        if not 0 <= self.k_star <= self.N:
            raise ConfigError(f"k_star must lie in [0, N={self.N}], got {self.k_star}")
        if self.fidelity not in FIDELITIES:
            raise ConfigError(f"Unknown fidelity kind: {self.fidelity}")
        if self.noise not in NOISES:
            raise ConfigError(f"Unknown noise kind: {self.noise}")
        if self.ensemble not in ENSEMBLES:
            raise ConfigError(f"Unknown matrix ensemble: {self.ensemble}")
        if self.ensemble == "file" and not self.matrix_path:
            raise ConfigError("the file ensemble needs a matrix path")
        if not 0 <= self.a_min <= self.a_max:
            raise ConfigError(f"amplitude range must satisfy 0 <= a_min <= a_max, got [{self.a_min}, {self.a_max}]")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be nonnegative, got {self.sigma}")
        if self.fidelity == "kl":
            if self.a_min <= 0:
                raise ConfigError("KL instances need a_min > 0")
            if self.background <= 0:
                raise ConfigError("KL instances need a positive background")
            if self.noise == "gaussian":
                raise ConfigError("KL instances take poisson or no noise")
        elif self.noise == "poisson":
            raise ConfigError("least-squares instances take gaussian or no noise")
        if self.normalize_columns is not None and self.normalize_columns <= 0:
            raise ConfigError(f"normalize_columns must be positive, got {self.normalize_columns}")
        return self

    def with_seed(self, seed):
        return InstanceSpec(**{**asdict(self), "seed": int(seed)})


class InstanceSpecBuilder:
    def __init__(self):
        self.params = {"N": None, "M": None, "k_star": None}

    def set_dimensions(self, N, M):
        self.params["N"] = int(N)
        self.params["M"] = int(M)
        return self

    def set_sparsity(self, k_star):
        self.params["k_star"] = int(k_star)
        return self

    def set_fidelity(self, fidelity):
        self.params["fidelity"] = fidelity
        return self

    def set_amplitudes(self, a_min, a_max):
        self.params["a_min"] = float(a_min)
        self.params["a_max"] = float(a_max)
        return self

    def set_noise(self, noise, sigma=0.0):
        self.params["noise"] = noise
        self.params["sigma"] = float(sigma)
        return self

    def set_background(self, background):
        self.params["background"] = float(background)
        return self

    def set_ensemble(self, ensemble, matrix_path=None):
        self.params["ensemble"] = ensemble
        self.params["matrix_path"] = matrix_path
        return self

    def set_normalize_columns(self, target):
        self.params["normalize_columns"] = None if target is None else float(target)
        return self

    def set_seed(self, seed):
        self.params["seed"] = int(seed)
        return self

    def build(self):
        missing = [k for k in ("N", "M", "k_star") if self.params.get(k) is None]
        if missing:
            raise ConfigError(f"instance spec is missing {missing}")
        return InstanceSpec(**self.params).validate()

    @classmethod
    def from_config(cls, cm, seed=None):
        builder = cls()
        builder.set_dimensions(cm.require('instance', 'N'), cm.require('instance', 'M'))
        builder.set_sparsity(cm.require('instance', 'k_star'))
        builder.set_fidelity(cm.get_choice('problem', 'fidelity', FIDELITIES, fallback='ls'))
        builder.set_amplitudes(cm.get_float('instance', 'a_min', 1.0), cm.get_float('instance', 'a_max', 2.0))
        builder.set_noise(cm.get('instance', 'noise', 'gaussian'), cm.get_float('instance', 'sigma', 0.0))
        builder.set_background(cm.get_float('instance', 'background', 1.0))
        builder.set_ensemble(cm.get('instance', 'ensemble', 'gaussian_iid'), cm.resolve_path('problem', 'matrix'))
        builder.set_normalize_columns(cm.get_float('instance', 'normalize_columns'))
        builder.set_seed(seed if seed is not None else cm.get_int('instance', 'seed', 0))
        return builder.build()


@dataclass
class Instance:
    A: np.ndarray
    x_star: Optional[np.ndarray]
    y: np.ndarray
    y_clean: Optional[np.ndarray]
    seed: int
    spec: Optional[InstanceSpec] = None
    b: Optional[np.ndarray] = None
    sigma_star: tuple = field(default=None)

    def __post_init__(self):
        if self.sigma_star is None and self.x_star is not None:
            self.sigma_star = tuple(int(i) for i in np.flatnonzero(self.x_star))

    @property
    def has_truth(self):
        return self.x_star is not None and self.y_clean is not None

    def require_truth(self):
        if not self.has_truth:
            raise ConfigError("this command needs the ground truth: set [truth] x_star")
        return self

    @property
    def eps(self):
        self.require_truth()
        return self.y - self.y_clean

    @property
    def eps_norm(self):
        return float(np.linalg.norm(self.eps))

    @property
    def eps_inf(self):
        return float(np.max(np.abs(self.eps))) if self.eps.size else 0.0

    @property
    def min_amplitude(self):
        amps = np.abs(self.x_star[list(self.sigma_star)])
        return float(amps.min()) if amps.size else math.inf

    @property
    def fidelity_kind(self):
        return "kl" if self.b is not None else "ls"


def _matrix(spec, rng):
    if spec.ensemble == "file":
        A = read_matrix(spec.matrix_path)
        if A.shape != (spec.M, spec.N):
            raise ConfigError(f"matrix file has shape {A.shape}, spec says {(spec.M, spec.N)}")
    else:
        A = rng.standard_normal((spec.M, spec.N)) / math.sqrt(spec.M)
    if spec.fidelity == "kl":
        A = np.abs(A)
    if spec.normalize_columns is not None:
        norms = np.linalg.norm(A, axis=0)
        A = A * np.where(norms > 0, spec.normalize_columns / np.where(norms > 0, norms, 1.0), 1.0)
    return A


def gen_instance(spec):
    spec.validate()
    rng = make_rng(spec.seed)
    A = _matrix(spec, rng)
    support = np.sort(rng.permutation(spec.N)[:spec.k_star])
    amps = rng.uniform(spec.a_min, spec.a_max, spec.k_star)
    if spec.fidelity == "ls":
        amps *= rng.choice([-1.0, 1.0], spec.k_star)
    x_star = np.zeros(spec.N)
    x_star[support] = amps
    b = None
    y_clean = A @ x_star
    if spec.fidelity == "kl":
        b = np.full(spec.M, spec.background)
        y_clean = y_clean + b
    if spec.noise == "gaussian":
        y = y_clean + spec.sigma * rng.standard_normal(spec.M)
    elif spec.noise == "poisson":
        y = rng.poisson(y_clean).astype(float)
    else:
        y = y_clean.copy()
    logger.debug(f"instance seed={spec.seed}: support={support.tolist()}, ||eps||={np.linalg.norm(y - y_clean):.4g}")
    return Instance(A=A, x_star=x_star, y=y, y_clean=y_clean, seed=spec.seed, spec=spec, b=b,
                    sigma_star=tuple(int(i) for i in support))


def save_instance(instance, directory):
    os.makedirs(directory, exist_ok=True)
    write_matrix(os.path.join(directory, "A.csv"), instance.A)
    write_vector(os.path.join(directory, "y.csv"), instance.y)
    if instance.has_truth:
        write_vector(os.path.join(directory, "x_star.csv"), instance.x_star)
        write_vector(os.path.join(directory, "y_clean.csv"), instance.y_clean)
    if instance.b is not None:
        write_vector(os.path.join(directory, "b.csv"), instance.b)
    meta = ConfigManager(os.path.join(directory, "instance.ini"), sections={})
    meta.set("instance", "seed", instance.seed)
    meta.set("instance", "fidelity", instance.fidelity_kind)
    if instance.sigma_star is not None:
        meta.set("instance", "sigma_star", ",".join(str(i) for i in instance.sigma_star))
    if instance.spec is not None:
        for key, value in asdict(instance.spec).items():
            if value is not None and key not in ("seed", "fidelity"):
                meta.set("spec", key, value)
    meta.save_config()
    logger.info(f"instance written to {directory}")


def _optional_vector(directory, name):
    path = os.path.join(directory, name)
    return read_vector(path) if os.path.exists(path) else None


def load_instance(directory):
    meta = ConfigManager(os.path.join(directory, "instance.ini"))
    sigma = meta.get_list("instance", "sigma_star", fallback=None, item_type=int)
    return Instance(
        A=read_matrix(os.path.join(directory, "A.csv")),
        x_star=_optional_vector(directory, "x_star.csv"),
        y=read_vector(os.path.join(directory, "y.csv")),
        y_clean=_optional_vector(directory, "y_clean.csv"),
        seed=meta.get_int("instance", "seed", 0),
        b=_optional_vector(directory, "b.csv"),
        sigma_star=tuple(sigma) if sigma is not None else None,
    )
