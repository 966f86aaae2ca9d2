"""Affine solution maps x(theta) = F theta + g and value functions
J(theta) = theta'Q theta + R theta + S over a region."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AffineMap:
    """x(theta) = F @ theta + g."""

    F: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.F, dtype=float))
        g = np.atleast_1d(np.asarray(self.g, dtype=float))
        if F.shape[0] != g.shape[0]:
            raise ValueError("AffineMap dimensions inconsistent")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "g", g)

    def __call__(self, theta):
        return self.F @ np.asarray(theta, dtype=float) + self.g

    def row(self, i):
        return self.F[i], float(self.g[i])

    def close_to(self, other: "AffineMap", tol=1e-7) -> bool:
        return (np.max(np.abs(self.F - other.F), initial=0.0) <= tol
                and np.max(np.abs(self.g - other.g), initial=0.0) <= tol)

    def to_json(self) -> dict:
        return {"F": self.F.tolist(), "g": self.g.tolist()}

    @staticmethod
    def from_json(obj) -> "AffineMap":
        return AffineMap(np.asarray(obj["F"], dtype=float),
                         np.asarray(obj["g"], dtype=float))


@dataclass(frozen=True)
class QuadForm:
    """J(theta) = theta' Q theta + R theta + S, with an explicit infinity flag
    for infeasible branches."""

    Q: np.ndarray
    R: np.ndarray
    S: float
    infinite: bool = False

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_1d(np.asarray(self.R, dtype=float)).reshape(-1)
        if Q.shape[0] != Q.shape[1] or Q.shape[0] != R.shape[0]:
            raise ValueError("QuadForm dimensions inconsistent")
        Q = 0.5 * (Q + Q.T)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "S", float(self.S))

    @staticmethod
    def infinity(n_theta: int) -> "QuadForm":
        return QuadForm(np.zeros((n_theta, n_theta)), np.zeros(n_theta), 0.0,
                        infinite=True)

    @staticmethod
    def affine(R, S) -> "QuadForm":
        R = np.atleast_1d(np.asarray(R, dtype=float)).reshape(-1)
        n = R.shape[0]
        return QuadForm(np.zeros((n, n)), R, float(S))

    @staticmethod
    def constant(S: float, n_theta: int) -> "QuadForm":
        return QuadForm.affine(np.zeros(n_theta), S)

    @property
    def n_theta(self) -> int:
        return self.R.shape[0]

    @property
    def is_affine(self) -> bool:
        return not self.infinite and np.max(np.abs(self.Q), initial=0.0) == 0.0

    def __call__(self, theta) -> float:
        if self.infinite:
            return np.inf
        theta = np.asarray(theta, dtype=float)
        return float(theta @ self.Q @ theta + self.R @ theta + self.S)

    def minus(self, other: "QuadForm") -> "QuadForm":
        if self.infinite or other.infinite:
            raise ValueError("cannot subtract infinite value functions")
        return QuadForm(self.Q - other.Q, self.R - other.R, self.S - other.S)

    def scaled_plus(self, scale: float, eps_R, eps_S: float) -> "QuadForm":
        """eps(theta) + scale * J(theta); used by the relaxed dominance test."""
        if self.infinite:
            return self
        eps_R = np.zeros(self.n_theta) if eps_R is None else np.asarray(eps_R, float)
        return QuadForm(scale * self.Q, scale * self.R + eps_R,
                        scale * self.S + eps_S)

    def to_json(self):
        if self.infinite:
            return None
        return {"Q": self.Q.tolist(), "R": self.R.tolist(), "S": self.S}

    @staticmethod
    def from_json(obj, n_theta=None) -> "QuadForm":
        if obj is None:
            return QuadForm.infinity(n_theta if n_theta else 1)
        return QuadForm(np.asarray(obj["Q"], dtype=float),
                        np.asarray(obj["R"], dtype=float), float(obj["S"]))
