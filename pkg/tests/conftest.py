import pytest

from cqbde.data import generate_synthetic_dataset, stratified_split
from cqbde.engine import AlgorithmConfig


@pytest.fixture(scope="session")
def small_data():
    return generate_synthetic_dataset(120, 15, 3, noise=0.25, seed=4)


@pytest.fixture(scope="session")
def small_split(small_data):
    return stratified_split(small_data, 0.8, seed=4)


def small_config(variant="CLQBDE-II", **kw):
    base = dict(variant=variant, pop_size=12, local_pop=6, generations=3, migrations=1, islands=2, theta=0.3)
    base.update(kw)
    return AlgorithmConfig(**base)
