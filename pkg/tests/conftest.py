import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scenariolab import DataRepository, SourceDataset


def make_dataset(source_id, values_by_attr, start=date(2016, 1, 1), dates=None):
    """Small in-memory dataset; values_by_attr maps attribute -> sequence."""
    names = tuple(values_by_attr)
    columns = [np.asarray(v, dtype=np.float64) for v in values_by_attr.values()]
    n = len(columns[0])
    if dates is None:
        dates = tuple(start + timedelta(days=i) for i in range(n))
    return SourceDataset(
        source_id=source_id,
        dates=tuple(dates),
        attribute_names=names,
        values=np.column_stack(columns),
    )


def make_repo(*datasets):
    repo = DataRepository()
    for ds in datasets:
        repo.add(ds)
    return repo


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
