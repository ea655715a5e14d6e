"""Tolerance defaults and the override-file loader.

Every numerical guard in the package reads its threshold from a
``Tolerances`` record so that studies which deliberately approach the
exceptional point can relax the defaults.  Setting the environment
variable ``NIPSQW_TOL_OVERRIDES`` to the path of a ``key=value`` file
changes the defaults process-wide.
"""

from __future__ import annotations

import dataclasses
import os

ENV_VAR = "NIPSQW_TOL_OVERRIDES"


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    eps_singular: relative determinant floor below which a matrix counts
        as singular.
    eps_pd: relative eigenvalue floor for positive definiteness.
    tol_real: |Im E| threshold for classifying an energy as real.
    ep_margin: |sin phi| guard radius around the exceptional point.
    fd_step: default central-difference step for the Coriolis matrix.
    """

    eps_singular: float = 1e-12
    eps_pd: float = 1e-10
    tol_real: float = 1e-9
    ep_margin: float = 1e-6
    fd_step: float = 1e-5

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)


def load_overrides(path: str) -> dict:
    """Parse a key=value override file; blank lines and # comments ignored."""
    known = {f.name for f in dataclasses.fields(Tolerances)}
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown tolerance {key!r}")
            overrides[key] = float(value)
    return overrides


def get_tolerances() -> Tolerances:
    """Defaults, with the override file applied when the env var is set."""
    path = os.environ.get(ENV_VAR)
    if not path:
        return Tolerances()
    return Tolerances(**load_overrides(path))
