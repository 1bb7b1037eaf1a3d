"""Stochastic validation of the analytic engine.

The detector amplitudes are jointly Gaussian, so probabilities can be
estimated by drawing the amplitudes directly and averaging products of
vacuum-subtracted intensities.  Sampling uses the real embedding of the
complex covariance pair (Gamma, C): the pair correlations live in the
pseudo-covariance C, which a proper complex sampler would discard.

Samples are drawn in fixed-size chunks, each from its own counter-keyed
stream (seed, chunk index), so estimates are independent of batching and
of any parallel split; batches only group chunk means for the standard
error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg.lapack import dpstrf

from .covariance import CovarianceModel, pair_correlation
from .detection import DetectorPort, component_zpf_intensity
from .fields import FieldExpr, Pol, conj

CHUNK_SAMPLES = 10_000

# Most negative acceptable eigenvalue of the real embedding covariance.
EMBEDDING_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class JointGaussianSpec:
    """Finite-dimensional Gaussian law of a set of port components.

    ``gamma`` holds <v v^dagger>, ``pseudo`` holds <v v^T>; ``zpf`` is the
    per-variable vacuum intensity subtracted at the detectors.
    """

    variables: tuple[tuple[str, Pol], ...]
    exprs: tuple[FieldExpr, ...]
    gamma: np.ndarray
    pseudo: np.ndarray
    zpf: np.ndarray
    port_names: tuple[str, ...]
    port_columns: dict[str, np.ndarray]
    efficiencies: dict[str, float]
    _factor: np.ndarray
    _perm: np.ndarray

    @property
    def n_variables(self) -> int:
        return len(self.variables)


def _real_embedding(gamma: np.ndarray, pseudo: np.ndarray) -> np.ndarray:
    """Covariance of (Re z, Im z) from the complex pair (Gamma, C)."""
    re_g, im_g = gamma.real, gamma.imag
    re_c, im_c = pseudo.real, pseudo.imag
    top = np.hstack([re_g + re_c, im_c - im_g])
    bottom = np.hstack([im_c + im_g, re_g - re_c])
    return 0.5 * np.vstack([top, bottom])


def build_joint_spec(ports: Sequence[DetectorPort],
                     model: CovarianceModel) -> JointGaussianSpec:
    """Assemble (Gamma, C) for the components of the given ports.

    Ports are ordered by name so the same set always yields the same
    variable layout (and therefore the same sample stream).  Raises if the
    real embedding is indefinite, which would signal an inconsistent
    covariance model.
    """
    ordered = sorted(ports, key=lambda p: p.name)
    names = tuple(p.name for p in ordered)
    if len(set(names)) != len(names):
        raise ValueError("duplicate ports in joint specification")

    variables: list[tuple[str, Pol]] = []
    exprs: list[FieldExpr] = []
    for port in ordered:
        for pol in (Pol.H, Pol.V):
            variables.append((port.name, pol))
            exprs.append(port.components[pol])

    n = len(exprs)
    conj_exprs = [conj(e) for e in exprs]
    gamma = np.empty((n, n), dtype=complex)
    pseudo = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            gamma[i, j] = pair_correlation(exprs[i], conj_exprs[j], model)
            pseudo[i, j] = pair_correlation(exprs[i], exprs[j], model)
    gamma = 0.5 * (gamma + gamma.conj().T)
    pseudo = 0.5 * (pseudo + pseudo.T)

    sigma = _real_embedding(gamma, pseudo)
    eigmin = float(np.linalg.eigvalsh(sigma).min())
    if eigmin < -EMBEDDING_TOL:
        raise ValueError(
            f"indefinite real embedding (min eigenvalue {eigmin}); "
            "the covariance model is inconsistent")

    # Pivoted Cholesky handles the semidefinite case; columns past the
    # numerical rank are dropped.
    factor, piv, rank, info = dpstrf(sigma, lower=1)
    if info < 0:
        raise RuntimeError(f"pivoted Cholesky failed (info={info})")
    factor = np.tril(factor)[:, :rank]
    perm = np.asarray(piv, dtype=int) - 1

    zpf = np.array([component_zpf_intensity(e, model) for e in exprs])
    columns = {
        name: np.array([k for k, (pname, _) in enumerate(variables)
                        if pname == name])
        for name in names
    }
    return JointGaussianSpec(
        variables=tuple(variables),
        exprs=tuple(exprs),
        gamma=gamma,
        pseudo=pseudo,
        zpf=zpf,
        port_names=names,
        port_columns=columns,
        efficiencies={p.name: p.efficiency for p in ordered},
        _factor=factor,
        _perm=perm,
    )


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    standard_error: float
    n_samples: int
    seed: int


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed, chunk], dtype=np.uint64)))


def _draw_chunk(spec: JointGaussianSpec, size: int, seed: int,
                chunk: int) -> np.ndarray:
    rng = _chunk_rng(seed, chunk)
    normals = rng.standard_normal((size, spec._factor.shape[1]))
    w = normals @ spec._factor.T
    full = np.empty((size, 2 * spec.n_variables))
    full[:, spec._perm] = w
    n = spec.n_variables
    return full[:, :n] + 1j * full[:, n:]


def sample(spec: JointGaussianSpec, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws of the component vector, deterministic in the seed."""
    if n <= 0:
        raise ValueError("sample count must be positive")
    chunks = []
    drawn = 0
    index = 0
    while drawn < n:
        size = min(CHUNK_SAMPLES, n - drawn)
        chunks.append(_draw_chunk(spec, size, seed, index))
        drawn += size
        index += 1
    return np.vstack(chunks)


def _subtracted_intensities(spec: JointGaussianSpec, z: np.ndarray,
                            port_names: Sequence[str]) -> list[np.ndarray]:
    out = []
    for name in port_names:
        cols = spec.port_columns[name]
        intensity = np.abs(z[:, cols]) ** 2
        out.append(intensity.sum(axis=1) - spec.zpf[cols].sum())
    return out


def _estimate_intensity_product(spec: JointGaussianSpec,
                                port_names: Sequence[str], n: int, seed: int,
                                batches: int) -> EstimatorResult:
    for name in port_names:
        if name not in spec.port_columns:
            raise ValueError(f"port {name} is not part of this specification")
    if n <= 0:
        raise ValueError("sample count must be positive")

    if n <= CHUNK_SAMPLES:
        n_chunks, chunk_size = 1, n
    else:
        n_chunks = math.ceil(n / CHUNK_SAMPLES)
        chunk_size = CHUNK_SAMPLES

    chunk_means = np.empty(n_chunks)
    for k in range(n_chunks):
        z = _draw_chunk(spec, chunk_size, seed, k)
        product = np.ones(chunk_size)
        for values in _subtracted_intensities(spec, z, port_names):
            product *= values
        chunk_means[k] = product.mean()

    scale = 1.0
    for name in port_names:
        scale *= spec.efficiencies[name]

    # The estimate depends only on the chunk stream; batches group chunk
    # means for the standard error and never touch the estimate itself.
    estimate = float(chunk_means.mean())
    groups = batches if n_chunks % batches == 0 else n_chunks
    if groups > 1:
        group_means = chunk_means.reshape(groups, -1).mean(axis=1)
        stderr = float(group_means.std(ddof=1) / math.sqrt(groups))
    else:
        stderr = float("nan")
    return EstimatorResult(scale * estimate, scale * stderr,
                           n_chunks * chunk_size, seed)


def estimate_joint(a: DetectorPort, b: DetectorPort, spec: JointGaussianSpec,
                   n: int, seed: int, batches: int = 100) -> EstimatorResult:
    """Sample-mean estimate of <(I_a - I_zpf,a)(I_b - I_zpf,b)>."""
    return _estimate_intensity_product(spec, [a.name, b.name], n, seed, batches)


def estimate_quadruple(a: DetectorPort, b: DetectorPort, c: DetectorPort,
                       d: DetectorPort, spec: JointGaussianSpec, n: int,
                       seed: int, batches: int = 100) -> EstimatorResult:
    """Sample-mean estimate of the four-fold subtracted-intensity product.

    The quadruple signal scales as the fourth power of the coupling while
    the subtraction noise does not, so desk-scale runs want a boosted
    coupling (g around 0.5); the analytic engine remains the authority at
    small g.
    """
    return _estimate_intensity_product(
        spec, [a.name, b.name, c.name, d.name], n, seed, batches)


def empirical_fourth_moment(z: np.ndarray, columns: Sequence[int],
                            batches: int = 100) -> tuple[complex, float]:
    """Mean and standard error of z_i z_j z_k z_l over a sample matrix."""
    i, j, k, l = columns
    values = z[:, i] * z[:, j] * z[:, k] * z[:, l]
    usable = (len(values) // batches) * batches
    if usable == 0 or batches < 2:
        return complex(values.mean()), float("nan")
    groups = values[:usable].reshape(batches, -1).mean(axis=1)
    mean = complex(groups.mean())
    stderr = math.hypot(float(groups.real.std(ddof=1)),
                        float(groups.imag.std(ddof=1))) / math.sqrt(batches)
    return mean, stderr
