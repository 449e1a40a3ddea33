"""Toy mixture dataset with a known latent structure.

Each drug carries a hidden scalar drawn from a standard Gaussian; a
mixture's response is the sum of its drugs' scalars plus Gaussian noise,
and the binary label is response > 0 (boundary counts as inactive). Drug
fingerprints are independent uniform random bit vectors, so by
construction they carry no information about the latent scalars: any
model performance above chance on them is inherited through shared
constituents, not learned chemistry. The fingerprint table is therefore
tagged "pseudo".

``informative_descriptors`` is the counterpart with signal: every
coordinate is the drug's latent scalar plus independent noise, tagged
"real".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import CollectionSpec, Dataset, MixtureKey, build_dataset, enumerate_complete
from .descriptors import DescriptorTable
from .errors import InvalidConfig


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    The noise Gaussian is parameterized by variance; pass ``noise_std``
    to specify the standard deviation directly instead (it wins when both
    are given).
    """

    n_drugs: int = 32
    arity: int = 3
    noise_variance: float = 0.5
    noise_std: float | None = None
    fingerprint_length: int = 128
    seed: int = 0

    def __post_init__(self):
        if self.arity < 2:
            raise InvalidConfig("arity must be >= 2")
        if self.n_drugs < self.arity:
            raise InvalidConfig("need at least as many drugs as mixture slots")
        if self.noise_variance < 0:
            raise InvalidConfig("noise_variance must be >= 0")
        if self.noise_std is not None and self.noise_std < 0:
            raise InvalidConfig("noise_std must be >= 0")
        if self.fingerprint_length < 1:
            raise InvalidConfig("fingerprint_length must be >= 1")

    @property
    def effective_noise_std(self) -> float:
        if self.noise_std is not None:
            return self.noise_std
        return math.sqrt(self.noise_variance)


@dataclass(frozen=True)
class SimDrug:
    local_id: str
    alpha: float
    fingerprint: np.ndarray


@dataclass(frozen=True)
class SimMixture:
    key: MixtureKey
    beta: float
    active: int


class SimResult(NamedTuple):
    dataset: Dataset
    descriptors: DescriptorTable
    drugs: list[SimDrug]
    mixtures: list[SimMixture]


def drug_ids(n_drugs: int) -> list[str]:
    """Zero-padded ids ("d01".."d32" for 32) so lexical order is numeric."""
    width = len(str(n_drugs))
    return [f"d{i + 1:0{width}d}" for i in range(n_drugs)]


def simulate(config: SimConfig) -> SimResult:
    """Generate the complete choose(D, N) dataset for one seed.

    Draw order is fixed (alphas, then fingerprints, then per-mixture
    noise in sorted mixture order), so results are bit-reproducible.
    """
    rng = np.random.default_rng(config.seed)
    ids = drug_ids(config.n_drugs)
    alphas = rng.standard_normal(config.n_drugs)
    prints = rng.integers(0, 2, size=(config.n_drugs, config.fingerprint_length))
    prints = prints.astype(np.float64)
    prints.flags.writeable = False

    drugs = [SimDrug(local_id=ids[i], alpha=float(alphas[i]), fingerprint=prints[i])
             for i in range(config.n_drugs)]
    alpha_of = {d.local_id: d.alpha for d in drugs}

    collections = (CollectionSpec(name="drugs", members=tuple(ids)),)
    keys = enumerate_complete(collections, config.arity, ordered=False)
    noise = rng.standard_normal(len(keys)) * config.effective_noise_std

    mixtures = []
    labeled_rows = []
    for key, eta in zip(keys, noise):
        beta = sum(alpha_of[c.local_id] for c in key.constituents) + float(eta)
        active = 1 if beta > 0 else 0
        mixtures.append(SimMixture(key=key, beta=beta, active=active))
        labeled_rows.append((key.local_ids, active))

    dataset = build_dataset(collections, config.arity, ordered=False,
                            labeled_rows=labeled_rows, label_kind="binary")
    table = DescriptorTable(
        length=config.fingerprint_length,
        kind="pseudo",
        vectors={d.local_id: d.fingerprint for d in drugs},
    )
    return SimResult(dataset=dataset, descriptors=table, drugs=drugs,
                     mixtures=mixtures)


def informative_descriptors(result: SimResult, length: int, seed: int,
                            noise_std: float = 1.0) -> DescriptorTable:
    """Descriptors that actually encode the latent scalar: each coordinate
    is alpha plus independent Gaussian noise. Tagged "real"."""
    if length < 1:
        raise InvalidConfig("length must be >= 1")
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}
    for drug in result.drugs:
        vec = drug.alpha + rng.standard_normal(length) * noise_std
        vec.flags.writeable = False
        vectors[drug.local_id] = vec
    return DescriptorTable(length=length, kind="real", vectors=vectors)
