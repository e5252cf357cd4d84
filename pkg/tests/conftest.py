import numpy as np
import pytest

from concomitant import DesignMatrix, SigmaFloor, SimulationSpec, TaskMatrix, gen_dataset


def random_instance(seed, n, p, q, blocks=None):
    """Generic unstructured random (X, Y) pair."""
    rng = np.random.default_rng(seed)
    X = DesignMatrix(rng.standard_normal((n, p)), blocks)
    Y = TaskMatrix(rng.standard_normal((n, q)))
    return X, Y


def structured_instance(seed, n=60, p=120, q=10, blocks=(20, 20, 20), support=10, snr=1.0, rho=0.7):
    """Block-noise dataset drawn from the benchmark generator."""
    spec = SimulationSpec(
        n=n,
        p=p,
        q=q,
        block_sizes=blocks,
        noise_multipliers=(1.0, 2.0, 5.0)[: len(blocks)],
        rho=rho,
        support_size=support,
        snr=snr,
        seed=seed,
    )
    return gen_dataset(spec)


def oracle_floor(data, scale=0.5):
    """Prior-information scalar floor: a fraction of the smallest true noise
    level (keeps the full-noise alternation well conditioned)."""
    return SigmaFloor((scale * float(np.min(data.sigma_star)),))


def oracle_block_floor(data, scale=0.5):
    return SigmaFloor(tuple(scale * s for s in data.sigma_star))
