"""Natural-frequency tuning for global frequency synchronization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import KuramotoParams, fmt
from .hypergraph import DegreeProfile

DELTA_CAP = 0.1


@dataclass(frozen=True)
class FrequencyAssignment:
    omega: np.ndarray
    Omega: float


@dataclass(frozen=True)
class DeltaBound:
    kappa: np.ndarray
    tau: float
    delta_max: float

    def to_json(self) -> str:
        return json.dumps({
            "tau": float(fmt(self.tau)),
            "kappa_max": float(fmt(self.kappa.max(initial=0.0))),
            "delta_max": float(fmt(self.delta_max)),
        })


def assign_frequencies(deg: DegreeProfile, Omega: float, p: KuramotoParams) -> FrequencyAssignment:
    """omega_i = Omega + sigma2 k_i^(2) sin(alpha2) + sigma3 k_i^(3) sin(alpha3).

    With identical initial phases every node then starts, and stays, at
    phase velocity ``Omega``.
    """
    omega = (Omega
             + p.sigma2 * deg.k(2) * math.sin(p.alpha2)
             + p.sigma3 * deg.k(3) * math.sin(p.alpha3))
    return FrequencyAssignment(np.asarray(omega, dtype=float), float(Omega))


def delta_max(deg: DegreeProfile, tau: float, p: KuramotoParams) -> DeltaBound:
    """Largest initial phase spread keeping the linearised |dtheta_i(0) - Omega| <= tau."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    kappa = (abs(p.sigma2 * math.cos(p.alpha2)) * deg.k(2)
             + 2.0 * abs(p.sigma3 * math.cos(p.alpha3)) * deg.k(3)).astype(float)
    kmax = float(kappa.max(initial=0.0))
    bound = DELTA_CAP if kmax == 0.0 else min(tau / kmax, DELTA_CAP)
    return DeltaBound(kappa, float(tau), bound)


def stability_margin(alpha2: float, alpha3: float) -> tuple[float, float, bool]:
    """Cosines of the frustrations and whether both are strictly positive."""
    c2, c3 = math.cos(alpha2), math.cos(alpha3)
    # cos(pi/2) evaluates to ~6e-17; treat that as the marginal zero it is.
    eps = 1e-12
    return c2, c3, (c2 > eps and c3 > eps)


def omega_to_csv(labels, omega) -> str:
    lines = ["label,omega"]
    lines += [f"{lab},{fmt(w)}" for lab, w in zip(labels, omega)]
    return "\n".join(lines) + "\n"


def omega_from_csv(text: str, labels) -> np.ndarray:
    rows = [ln.split(",") for ln in text.strip().splitlines()]
    if not rows or rows[0] != ["label", "omega"]:
        raise ValueError('omega CSV must start with a "label,omega" header')
    table = {r[0]: float(r[1]) for r in rows[1:]}
    missing = [lab for lab in labels if lab not in table]
    if missing:
        raise ValueError(f"omega CSV lacks nodes {missing[:5]}")
    return np.array([table[lab] for lab in labels])
