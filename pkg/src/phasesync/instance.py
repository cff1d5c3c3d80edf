"""Synthetic phase-synchronization instances C = z* z*^H + sigma W.

Random streams: the instance seed feeds ``numpy.random.SeedSequence``, whose
first two spawned children drive the ground-truth and the noise streams
respectively, each through a counter-based Philox generator. Wigner entries
are drawn for the strict upper triangle in row-major order, real parts
first, then imaginary parts, each N(0, 1/2).
"""

from __future__ import annotations

import base64
import dataclasses
import enum
import hashlib
import json
import logging
import math
import os

import numpy as np

from .core import as_phase_vector

log = logging.getLogger(__name__)

FORMAT_NAME = "phasesync-instance"
FORMAT_VERSION = 1


class GroundTruth(str, enum.Enum):
    RANDOM_PHASES = "random-phases"
    ALL_ONES = "all-ones"


class InstanceFileError(Exception):
    """Base class for instance file problems."""


class InstanceIOError(InstanceFileError):
    pass


class MalformedFileError(InstanceFileError):
    pass


class UnsupportedVersionError(InstanceFileError):
    pass


class ChecksumMismatchError(InstanceFileError):
    pass


class EigensolverError(RuntimeError):
    pass


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    truth, noise = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.Generator(np.random.Philox(truth)), np.random.Generator(np.random.Philox(noise))


def _wigner_from(gen: np.random.Generator, n: int) -> np.ndarray:
    iu = np.triu_indices(n, 1)
    m = iu[0].size
    scale = math.sqrt(0.5)
    vals = (gen.standard_normal(m) + 1j * gen.standard_normal(m)) * scale
    W = np.zeros((n, n), dtype=complex)
    W[iu] = vals
    W[(iu[1], iu[0])] = np.conj(vals)
    return W


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def sample_wigner(n: int, seed: int) -> np.ndarray:
    """Hermitian Wigner matrix: zero diagonal, E|W_jl|^2 = 1 above it."""
    n = _check_n(n)
    return _wigner_from(np.random.Generator(np.random.Philox(int(seed))), n)


def sample_ground_truth(n: int, seed: int, mode: GroundTruth | str = GroundTruth.RANDOM_PHASES) -> np.ndarray:
    n = _check_n(n)
    if GroundTruth(mode) is GroundTruth.ALL_ONES:
        return np.ones(n, dtype=complex)
    gen = np.random.Generator(np.random.Philox(int(seed)))
    return np.exp(2j * np.pi * gen.random(n))


@dataclasses.dataclass(frozen=True, eq=False)
class Instance:
    n: int
    sigma: float
    z_star: np.ndarray
    W: np.ndarray
    C: np.ndarray
    seed: int
    mode: str = GroundTruth.RANDOM_PHASES.value

    def __post_init__(self):
        for a in (self.z_star, self.W, self.C):
            a.setflags(write=False)

    @property
    def delta(self) -> np.ndarray:
        return self.sigma * self.W

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.n == other.n and self.sigma == other.sigma and self.seed == other.seed
                and self.mode == other.mode and np.array_equal(self.z_star, other.z_star)
                and np.array_equal(self.W, other.W) and np.array_equal(self.C, other.C))


def assemble(z_star: np.ndarray, W: np.ndarray, sigma: float, seed: int = 0,
             mode: str = GroundTruth.RANDOM_PHASES.value) -> Instance:
    """Build an instance from explicit parts; C comes out exactly Hermitian."""
    z_star = as_phase_vector(z_star)
    W = np.asarray(W, dtype=complex)
    n = z_star.size
    if W.shape != (n, n):
        raise ValueError(f"W has shape {W.shape}, expected {(n, n)}")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if not np.array_equal(W, W.conj().T):
        raise ValueError("W must be exactly Hermitian")
    # mirror the strict upper triangle so that C == C^H holds bit for bit
    P = np.triu(np.outer(z_star, z_star.conj()), 1)
    P = P + P.conj().T
    P[np.diag_indices(n)] = np.abs(z_star) ** 2
    C = P + sigma * W
    return Instance(n=n, sigma=float(sigma), z_star=z_star.copy(), W=W.copy(), C=C,
                    seed=int(seed), mode=str(GroundTruth(mode).value))


def build_instance(n: int, sigma: float, seed: int,
                   mode: GroundTruth | str = GroundTruth.RANDOM_PHASES) -> Instance:
    n = _check_n(n)
    if not sigma >= 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma!r}")
    if not 0 <= int(seed) < 2 ** 64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    truth_gen, noise_gen = _streams(seed)
    if GroundTruth(mode) is GroundTruth.ALL_ONES:
        z = np.ones(n, dtype=complex)
    else:
        z = np.exp(2j * np.pi * truth_gen.random(n))
    W = _wigner_from(noise_gen, n)
    return assemble(z, W, sigma, seed, mode)


@dataclasses.dataclass(frozen=True)
class NoiseStats:
    n: int
    delta_op: float
    delta_zstar_inf: float
    lambda_min: float
    lambda_max: float

    @property
    def thm1_ok(self) -> bool:
        return self.delta_op <= self.n / 16

    @property
    def thm3_ok(self) -> bool:
        return self.delta_op <= self.n ** 0.75 / 312 and self.delta_zstar_inf <= self.n / 24

    @property
    def prop_ebcrit_ok(self) -> bool:
        return self.delta_op <= self.n ** (2 / 3) / 32768 and self.delta_zstar_inf <= self.n / 24

    @property
    def assumptions(self) -> dict[str, bool]:
        return {"thm1_ok": self.thm1_ok, "thm3_ok": self.thm3_ok, "prop_ebcrit_ok": self.prop_ebcrit_ok}

    def alpha_below_cap(self, alpha: float) -> bool:
        """Strict alpha < n / ||Delta||_op (always true without noise)."""
        return self.delta_op == 0 or alpha * self.delta_op < self.n

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.update(self.assumptions)
        return d


def noise_stats(inst: Instance) -> NoiseStats:
    delta = inst.delta
    try:
        eig = np.linalg.eigvalsh(delta)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"Hermitian eigensolve of Delta (n={inst.n}) failed: {exc}") from exc
    lo, hi = float(eig[0]), float(eig[-1])
    op = max(abs(lo), abs(hi))
    zinf = float(np.abs(delta @ inst.z_star).max())
    if inst.sigma > 0 and inst.n >= 100 and op > 3 * inst.sigma * math.sqrt(inst.n):
        log.warning("||Delta||_op = %.4g exceeds 3 sigma sqrt(n) = %.4g (seed %d)",
                    op, 3 * inst.sigma * math.sqrt(inst.n), inst.seed)
    return NoiseStats(n=inst.n, delta_op=op, delta_zstar_inf=zinf, lambda_min=lo, lambda_max=hi)


def encode_array(a: np.ndarray) -> str:
    """Base64 of the little-endian float64 re/im-interleaved payload."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    return base64.b64encode(a.view(np.float64).astype("<f8").tobytes()).decode("ascii")


def decode_array(s: str, shape: tuple[int, ...]) -> np.ndarray:
    raw = base64.b64decode(s.encode("ascii"), validate=True)
    flat = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    if flat.size != 2 * math.prod(shape):
        raise ValueError(f"payload holds {flat.size} doubles, expected {2 * math.prod(shape)}")
    return flat.view(np.complex128).reshape(shape).copy()


def _checksum(header: dict, payload: dict) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(header, sort_keys=True).encode())
    for key in sorted(payload):
        h.update(key.encode())
        h.update(payload[key].encode())
    return h.hexdigest()


def instance_document(inst: Instance) -> dict:
    header = {"n": inst.n, "sigma": inst.sigma, "seed": inst.seed, "mode": inst.mode}
    payload = {"z_star": encode_array(inst.z_star), "W": encode_array(inst.W), "C": encode_array(inst.C)}
    return {"format": FORMAT_NAME, "version": FORMAT_VERSION, **header,
            "payload": payload, "checksum": _checksum(header, payload)}


def instance_checksum(inst: Instance) -> str:
    return instance_document(inst)["checksum"]


def save_instance(inst: Instance, path) -> None:
    doc = instance_document(inst)
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise InstanceIOError(f"cannot write {path}: {exc}") from exc


def instance_from_document(doc: dict) -> Instance:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise MalformedFileError("not a phasesync instance document")
    if doc.get("version") != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported version {doc.get('version')!r}")
    try:
        header = {"n": doc["n"], "sigma": doc["sigma"], "seed": doc["seed"], "mode": doc["mode"]}
        payload = {k: doc["payload"][k] for k in ("z_star", "W", "C")}
        checksum = doc["checksum"]
    except (KeyError, TypeError) as exc:
        raise MalformedFileError(f"missing field {exc}") from exc
    if _checksum(header, payload) != checksum:
        raise ChecksumMismatchError("instance checksum does not match its content")
    n = header["n"]
    if not isinstance(n, int) or n < 1:
        raise MalformedFileError(f"bad dimension {n!r}")
    try:
        z = decode_array(payload["z_star"], (n,))
        W = decode_array(payload["W"], (n, n))
        C = decode_array(payload["C"], (n, n))
    except ValueError as exc:
        raise MalformedFileError(str(exc)) from exc
    return Instance(n=n, sigma=float(header["sigma"]), z_star=z, W=W, C=C,
                    seed=int(header["seed"]), mode=str(header["mode"]))


def load_instance(path) -> Instance:
    if not os.path.exists(path):
        raise InstanceIOError(f"no such file: {path}")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InstanceIOError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFileError(f"{path}: {exc}") from exc
    return instance_from_document(doc)
