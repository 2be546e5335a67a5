"""Comparison matrices: one case, several scheme variants, aligned outputs.

Runs every variant of a base configuration (varying e.g. the correction
parameter or the two-point flux), then writes one CSV per extraction line
with a density column per variant, suitable for overlay plots.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from ..fields import extract_line
from .config import ConfigError, RunConfig, _parse_value
from .io import write_csv
from .run import setup_run


def cli_compare(config: RunConfig, vary_key: str, vary_values,
                out_dir=None) -> dict:
    """Run the matrix of configs obtained by setting `vary_key` to each of
    `vary_values`; returns {line -> (positions, {label -> density})}."""
    if vary_key not in RunConfig.__dataclass_fields__:
        raise ConfigError(f"unknown config key {vary_key!r}")
    solvers = {}
    for raw in vary_values:
        value = _parse_value(vary_key, str(raw))
        label = str(raw)
        solvers[label] = setup_run(replace(config, **{vary_key: value}))

    case = next(iter(solvers.values())).case
    lines = tuple(config.extract) or tuple(case.extract_lines)
    results = {}
    for label, solver in solvers.items():
        res = solver.run()
        if res.failure is not None:
            raise RuntimeError(
                f"variant {vary_key}={label} failed positivity at "
                f"t={res.failure.time}")
        results[label] = (solver, res)

    bundles = {}
    for axis, value in lines:
        columns = {}
        positions = None
        for label, (solver, res) in results.items():
            pos, states = extract_line(solver.mesh, solver.ops, res.u,
                                       axis, value)
            if positions is None:
                positions = pos
            elif not np.allclose(positions, pos):
                raise RuntimeError("extraction grids differ between variants")
            columns[label] = states[:, 0]
        bundles[(axis, value)] = (positions, columns)
        if out_dir is not None:
            header = ["position"] + [f"rho[{k}]" for k in columns]
            rows = zip(positions, *columns.values())
            name = f"compare_{vary_key}_{'xy'[axis]}{value:g}.csv"
            write_csv(Path(out_dir) / name, header, rows)
    return bundles
