"""Spectrum container shared by all eigensolvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SLSpectrum"]


@dataclass(frozen=True, eq=False)
class SLSpectrum:
    """Eigenvalues lambda_0 <= lambda_1 < ... with per-mode error estimates."""

    lambdas: np.ndarray
    method: str
    estimated_error: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lambdas", np.asarray(self.lambdas, dtype=float))
        object.__setattr__(self, "estimated_error", np.asarray(self.estimated_error, dtype=float))

    @property
    def energies(self) -> np.ndarray:
        """E_n = sqrt(lambda_n); tiny negative round-off in lambda_0 maps to 0."""
        return np.sqrt(np.clip(self.lambdas, 0.0, None))

    @property
    def n_max(self) -> int:
        return self.lambdas.size - 1

    def __len__(self):
        return self.lambdas.size

    def ordered(self) -> bool:
        return bool(np.all(np.diff(self.lambdas) > 0))

    def truncated(self, n_max: int) -> "SLSpectrum":
        return SLSpectrum(self.lambdas[:n_max + 1], self.method, self.estimated_error[:n_max + 1],
                          dict(self.metadata))
