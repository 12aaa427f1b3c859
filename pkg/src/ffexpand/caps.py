"""Size caps guarding against accidental blowup.

All experiments are desk scale; the caps below keep a typo in a field
spec from turning a sub-second run into hours. Every cap can be raised
(or lowered, for tests) through the FFEXPAND_CAP_OVERRIDE environment
variable, a JSON object keyed by field name, e.g.

    FFEXPAND_CAP_OVERRIDE='{"field_size": 10000000}'
"""

import json
import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "FFEXPAND_CAP_OVERRIDE"


@dataclass(frozen=True)
class Caps:
    field_size: int = 3_000_000       # largest constructible q^m
    dense_table: int = 2048           # q up to which 2D op tables are built
    graph_q: int = 128                # adjacency-list graph cap
    dense_spectrum_q: int = 64        # dense eigensolver cap (matrix q^2 x q^2)
    factor_degree: int = 12           # total-degree cap for bivariate factoring
    point_scan: int = 4_000_000       # pairs scanned when counting curve points
    image_evals: int = 100_000_000    # pointwise budget for value-set computation
    sweep_exhaustive_q: int = 13      # exhaustive q^4 parameter sweeps up to here
    ternary_degree: int = 32          # assembled ternary polynomial degree cap


def get_caps() -> Caps:
    """Default caps merged with any environment override."""
    caps = Caps()
    raw = os.environ.get(ENV_VAR)
    if not raw:
        return caps
    try:
        override = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{ENV_VAR} is not valid JSON: {exc}") from exc
    known = {f.name for f in fields(Caps)}
    bad = set(override) - known
    if bad:
        raise ValueError(f"{ENV_VAR} names unknown caps: {sorted(bad)}")
    return replace(caps, **{k: int(v) for k, v in override.items()})
