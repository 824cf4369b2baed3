"""Seeded synthetic weather-like data for end-to-end tests.

weather_system builds six humidity series sharing a slow latent driver (so
all pairs stay highly correlated) where the first location's humidity also
responds to its own observable temperature and the idiosyncratic noise of
single stations is large enough that neighbours genuinely add information.
noiseless_pair builds a two-source system whose target is an exact function
of lagged context and one neighbour.
"""

from __future__ import annotations

import csv
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from scenariolab import DataRepository, SourceDataset

LOCATIONS = ("loc_a", "loc_b", "loc_c", "loc_d", "loc_e", "loc_f")


def _ar1(rng, n, rho, scale):
    out = np.empty(n)
    out[0] = rng.normal(0.0, scale)
    noise = rng.normal(0.0, scale, size=n)
    for t in range(1, n):
        out[t] = rho * out[t - 1] + noise[t]
    return out


def _dates(n, start=date(2016, 1, 1)):
    return tuple(start + timedelta(days=t) for t in range(n))


def weather_system(n_days=1000, seed=7):
    """Six stations with temp+hum columns; loc_a is the prediction target.

    hum_i(t) = 50 + 3*latent(t) + noise_i(t), and for loc_a additionally
    + 2.5*(temp_a(t-1) - 10), so context and neighbours both carry signal
    the station's own history lacks: temperature is weakly autocorrelated
    (its lag-1 value is not recoverable from humidity history) and the
    neighbours average the idiosyncratic noise out of the shared latent.
    """
    rng = np.random.default_rng(seed)
    latent = _ar1(rng, n_days, 0.92, 0.6)
    temps = {loc: 10.0 + _ar1(rng, n_days, 0.55, 1.0) for loc in LOCATIONS}

    hums = {}
    for loc in LOCATIONS:
        hum = 50.0 + 3.0 * latent + rng.normal(0.0, 1.2, size=n_days)
        if loc == "loc_a":
            shifted = np.empty(n_days)
            shifted[0] = 0.0
            shifted[1:] = temps[loc][:-1] - 10.0
            hum = hum + 2.5 * shifted
        hums[loc] = hum

    dates = _dates(n_days)
    repo = DataRepository()
    for loc in LOCATIONS:
        repo.add(
            SourceDataset(
                source_id=loc,
                dates=dates,
                attribute_names=("temp", "hum"),
                values=np.column_stack([temps[loc], hums[loc]]),
            )
        )
    return repo


def noiseless_pair(n_days=400, seed=3):
    """Main hum is an exact function of lagged context and one neighbour."""
    rng = np.random.default_rng(seed)
    neighbor_hum = 40.0 + 4.0 * _ar1(rng, n_days, 0.9, 0.8)
    context = 12.0 + 3.0 * _ar1(rng, n_days, 0.8, 1.0)

    main_hum = np.empty(n_days)
    main_hum[0] = 45.0
    for t in range(1, n_days):
        main_hum[t] = 5.0 + 0.6 * neighbor_hum[t - 1] + 0.9 * (context[t - 1] - 12.0)

    dates = _dates(n_days)
    repo = DataRepository()
    repo.add(
        SourceDataset(
            source_id="main",
            dates=dates,
            attribute_names=("temp", "hum"),
            values=np.column_stack([context, main_hum]),
        )
    )
    repo.add(
        SourceDataset(
            source_id="north",
            dates=dates,
            attribute_names=("hum",),
            values=neighbor_hum.reshape(-1, 1),
        )
    )
    return repo


def write_repo_csvs(repo: DataRepository, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for sid in repo.source_ids:
        ds = repo[sid]
        with (directory / f"{sid}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date", *ds.attribute_names])
            for d, row in zip(ds.dates, ds.values):
                writer.writerow([d.isoformat()] + [repr(float(v)) for v in row])
    return directory
