"""Sample container shared by the sampler, estimators and fitting code."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleError, DomainError


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Real observations together with the (assumed known) location ``mu``.

    ``values`` is stored as a read-only float array.  A value exactly equal
    to ``mu`` is rejected because its log-distance is undefined; under a
    continuous model that is a probability-zero event, so it signals a data
    problem rather than something to clamp.
    """

    values: np.ndarray
    mu: float = 0.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("SampleSet must be nonempty")
        if np.isnan(arr).any():
            raise DomainError(f"SampleSet contains NaN at index {int(np.flatnonzero(np.isnan(arr))[0])}")
        mu = float(self.mu)
        if not np.isfinite(mu):
            raise DomainError(f"location mu must be finite, got {mu!r}")
        hits = np.flatnonzero(arr == mu)
        if hits.size:
            i = int(hits[0])
            raise DegenerateSampleError(i, float(arr[i]), mu)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "mu", mu)

    def __len__(self):
        return self.values.size

    @property
    def n(self):
        return self.values.size

    def distances(self):
        """Absolute deviations ``|x_i - mu|``."""
        return np.abs(self.values - self.mu)

    def head(self, n):
        """The first ``n`` observations as a new SampleSet (prefix subsample)."""
        if n < 1:
            raise DomainError(f"subsample size must be >= 1, got {n}")
        return SampleSet(self.values[: int(n)], self.mu)
