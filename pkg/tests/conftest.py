import pytest

from texrel.concepts import TaskType
from texrel.datafile import DatasetConfig
from texrel.sampling import TaskSpec

DESK_SPLITS = (20, 6, 6, 6, 6)


def desk_config(
    task=TaskType.REL,
    arity=2,
    splits=DESK_SPLITS,
    images_per_side=8,
    positives_per_side=4,
    seed=1234,
    **task_kwargs,
) -> DatasetConfig:
    """Small config that keeps unit tests fast; the acceptance suite uses
    the spec's desk profile (200/50/50/50/50 with 32+32 images)."""
    return DatasetConfig(
        task=TaskSpec(task=task, arity=arity, **task_kwargs),
        examples_per_split=splits,
        images_per_side=images_per_side,
        positives_per_side=positives_per_side,
        master_seed=seed,
    )


@pytest.fixture(scope="session")
def rel_dataset():
    from texrel.builder import build_dataset

    return build_dataset(desk_config())


@pytest.fixture(scope="session")
def texcol2_dataset():
    from texrel.builder import build_dataset

    return build_dataset(desk_config(task=TaskType.TEXCOL, arity=2, seed=77))
