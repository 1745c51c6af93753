import hashlib
import json
import os
from pathlib import Path

import numpy as np
import pytest

from zenoladder import dynamics
from zenoladder.analysis import EETimeSeries

CACHE_DIR = Path(__file__).parent / "_cache"


class RunCache:
    """Disk-backed memo for expensive quench runs (keyed by the full spec).

    Delete tests/_cache after changing any numerics; set
    ZENOLADDER_TEST_CACHE=0 to disable entirely.
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled

    def series(self, spec: dynamics.QuenchSpec, targets=None) -> EETimeSeries:
        if not self.enabled:
            return dynamics.run_quench(spec, targets=targets)
        payload = dict(spec.metadata())
        payload["targets"] = [int(t) for t in targets] if targets is not None else None
        key = hashlib.sha1(json.dumps(payload, sort_keys=True).encode()).hexdigest()
        path = CACHE_DIR / f"{key}.npz"
        if path.exists():
            data = np.load(path, allow_pickle=False)
            meta = json.loads(str(data["metadata"]))
            return EETimeSeries(
                times=data["times"],
                entropies=data["entropies"],
                metadata=meta,
                norm_errors=data["norm_errors"],
                coefficients=data["coefficients"] if "coefficients" in data else None,
                target_indices=tuple(targets) if targets is not None else None,
            )
        series = dynamics.run_quench(spec, targets=targets)
        CACHE_DIR.mkdir(exist_ok=True)
        arrays = {
            "times": series.times,
            "entropies": series.entropies,
            "norm_errors": series.norm_errors,
            "metadata": np.array(json.dumps(series.metadata)),
        }
        if series.coefficients is not None:
            arrays["coefficients"] = series.coefficients
        np.savez(path, **arrays)
        return series


@pytest.fixture(scope="session")
def run_cache() -> RunCache:
    return RunCache(enabled=os.environ.get("ZENOLADDER_TEST_CACHE", "1") != "0")
