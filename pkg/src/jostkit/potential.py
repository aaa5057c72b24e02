"""Potentials on uniform grids, weighted L^1_gamma norms, reference library.

A potential is a sampled real function V on a uniform x-grid, optionally
carrying an analytic tag (closed form used to fill samples, a derivative
array, and jump metadata for discontinuous wells). Construction of tagged
potentials enforces the truncation criterion

    int_{|x|>R} (1+|x|)^2 |V| < 1e-10,

R being the grid half-width, so that every downstream integral over supp V
is honestly represented on the window.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grids import UniformGrid
from .quadrature import Jump, trapz

TRUNCATION_TOL = 1e-10

_TAGS = ("free", "square_well", "sech2", "gaussian", "bump")


class InvalidPotential(ValueError):
    pass


@dataclass(frozen=True)
class Potential:
    """Sampled real potential with optional analytic metadata.

    samples follow the half-value convention at jump nodes: the stored value
    is the mean of the one-sided limits, which keeps trapezoid sums second
    order through the discontinuity.
    """

    grid: UniformGrid
    samples: np.ndarray
    analytic_tag: str | None = None
    params: dict = field(default_factory=dict)
    deriv_samples: np.ndarray | None = None
    jumps: tuple = ()          # Jump records for V itself (df=dV, dfp=dV')
    decay_warning: bool = False
    hash: str = ""

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.n,):
            raise InvalidPotential("sample count does not match grid")
        if not np.all(np.isfinite(s)):
            raise InvalidPotential("potential samples must be finite")
        object.__setattr__(self, "samples", s)
        if self.deriv_samples is not None:
            object.__setattr__(self, "deriv_samples", np.asarray(self.deriv_samples, dtype=float))
        if not self.hash:
            object.__setattr__(self, "hash", self._digest())

    def _digest(self) -> str:
        h = hashlib.sha256()
        meta = {
            "tag": self.analytic_tag,
            "params": {k: float(v) for k, v in sorted(self.params.items())},
            "grid": self.grid.spec(),
        }
        h.update(json.dumps(meta, sort_keys=True).encode())
        h.update(self.samples.astype("<f8").tobytes())
        return h.hexdigest()[:16]

    @property
    def x(self) -> np.ndarray:
        return self.grid.points()

    def deriv(self) -> np.ndarray:
        """dV/dx samples; analytic where tagged, 2nd-order differences otherwise."""
        if self.deriv_samples is not None:
            return self.deriv_samples
        return np.gradient(self.samples, self.grid.dx)

    def norms(self) -> "WeightedNorms":
        return WeightedNorms(
            l1=weighted_norm(self, 0),
            l1_1=weighted_norm(self, 1),
            l1_2=weighted_norm(self, 2),
            tV_l1=trapz(np.abs(self.x) * np.abs(self.samples), self.grid.dx),
        )

    def support_bounds(self, tol: float = 0.0) -> tuple[float, float]:
        """Smallest [a, b] with |V| <= tol outside (grid window if V tiny everywhere)."""
        nz = np.nonzero(np.abs(self.samples) > tol)[0]
        if len(nz) == 0:
            return (self.grid.x0, self.grid.x0)
        x = self.x
        return (float(x[nz[0]]), float(x[nz[-1]]))

    def rho_plus(self) -> np.ndarray:
        """rho+(x_i) = int_{x_i}^inf |V|."""
        from .quadrature import cumtrapz_suffix

        return cumtrapz_suffix(np.abs(self.samples), self.grid.dx)

    def rho_minus(self) -> np.ndarray:
        from .quadrature import cumtrapz_prefix

        return cumtrapz_prefix(np.abs(self.samples), self.grid.dx)

    def reflected(self) -> "Potential":
        """V(-x) on the reflected grid (used to get m- from the m+ solver)."""
        jumps = tuple(
            Jump(self.grid.n - 1 - j.index, -np.asarray(j.df), np.asarray(j.dfp))
            for j in self.jumps
        )
        dv = None if self.deriv_samples is None else -self.deriv_samples[::-1]
        return Potential(
            grid=UniformGrid(-self.grid.x1, self.grid.dx, self.grid.n),
            samples=self.samples[::-1].copy(),
            analytic_tag=self.analytic_tag,
            params=dict(self.params, reflected=1.0),
            deriv_samples=dv,
            jumps=jumps,
            decay_warning=self.decay_warning,
        )

    # serialization: JSON header + float64-LE sidecar named by hash
    def save(self, directory) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        side = d / f"{self.hash}.f64"
        side.write_bytes(self.samples.astype("<f8").tobytes())
        meta = {
            "tag": self.analytic_tag,
            "params": self.params,
            "grid": self.grid.spec(),
            "hash": self.hash,
        }
        p = d / f"{self.hash}.json"
        p.write_text(json.dumps(meta, sort_keys=True, indent=1))
        return p

    @staticmethod
    def load(json_path) -> "Potential":
        p = Path(json_path)
        meta = json.loads(p.read_text())
        grid = UniformGrid.from_spec(meta["grid"])
        raw = (p.parent / f"{meta['hash']}.f64").read_bytes()
        samples = np.frombuffer(raw, dtype="<f8").astype(float)
        if meta.get("tag"):
            pot = reference_potential(meta["tag"], meta.get("params", {}), grid)
            if not np.array_equal(pot.samples, samples):
                raise InvalidPotential("sidecar samples disagree with analytic tag")
            return pot
        return Potential(grid=grid, samples=samples)


@dataclass(frozen=True)
class WeightedNorms:
    l1: float
    l1_1: float
    l1_2: float
    tV_l1: float


def weighted_norm(V: Potential, gamma: int) -> float:
    """Trapezoid value of int (1+|x|)^gamma |V| over the grid."""
    if gamma not in (0, 1, 2):
        raise ValueError("gamma must be 0, 1 or 2")
    if not np.all(np.isfinite(V.samples)):
        raise InvalidPotential("potential samples must be finite")
    w = (1.0 + np.abs(V.x)) ** gamma
    return float(trapz(w * np.abs(V.samples), V.grid.dx))


def _tail_weight(u: np.ndarray) -> np.ndarray:
    return (1.0 + np.abs(u)) ** 2


def _eval_tag(tag: str, params: dict, x: np.ndarray):
    """Returns (V, V', list of jump x-positions)."""
    if tag == "free":
        z = np.zeros_like(x)
        return z, z.copy(), []
    if tag == "square_well":
        depth = float(params["depth"])
        width = float(params["width"])
        a = width / 2.0
        inside = np.abs(x) < a - 1e-12
        V = np.where(inside, depth, 0.0)
        on_edge = np.isclose(np.abs(x), a, rtol=0.0, atol=1e-9)
        V = np.where(on_edge, depth / 2.0, V)   # half-value at the jump nodes
        return V, np.zeros_like(x), [-a, a]
    if tag == "sech2":
        amp = float(params["amplitude"])
        scale = float(params.get("scale", 1.0))
        u = x / scale
        e = np.exp(-np.abs(u))           # overflow-safe sech
        s = 2.0 * e / (1.0 + e * e)
        V = amp * s * s
        dV = -2.0 * amp * s * s * np.tanh(u) / scale
        return V, dV, []
    if tag == "gaussian":
        amp = float(params["amplitude"])
        width = float(params.get("width", 1.0))
        center = float(params.get("center", 0.0))
        u = (x - center) / width
        V = amp * np.exp(-u * u)
        dV = V * (-2.0 * u / width)
        return V, dV, []
    if tag == "bump":
        amp = float(params["amplitude"])
        radius = float(params.get("radius", 1.0))
        u = x / radius
        V = np.zeros_like(x)
        dV = np.zeros_like(x)
        inner = np.abs(u) < 1.0 - 1e-12
        ui = u[inner]
        e = np.exp(-1.0 / (1.0 - ui * ui))
        V[inner] = amp * np.e * e          # normalized so V(0) = amp
        dV[inner] = V[inner] * (-2.0 * ui / (1.0 - ui * ui) ** 2) / radius
        return V, dV, []
    raise ValueError(f"unknown potential tag {tag!r}")


def reference_potential(tag: str, params: dict, grid: UniformGrid) -> Potential:
    """Closed-form potential sampled on `grid` with analytic metadata attached.

    A tag whose (1+|x|)^2-weighted tail mass beyond the window exceeds 1e-10 is
    flagged (decay_warning), not rejected.
    """
    if tag not in _TAGS:
        raise ValueError(f"unknown potential tag {tag!r}")
    x = grid.points()
    V, dV, jump_pos = _eval_tag(tag, params, x)

    jumps = []
    aligned = True
    for xj in jump_pos:
        try:
            idx = grid.index_of(xj)
        except ValueError:
            aligned = False
            continue
        left = _eval_tag(tag, params, np.array([xj - 1e-7]))[0][0]
        right = _eval_tag(tag, params, np.array([xj + 1e-7]))[0][0]
        jumps.append(Jump(idx, right - left, 0.0))
    if not aligned:
        raise InvalidPotential(
            "square_well edges must lie on grid nodes (choose a commensurate grid)"
        )

    warning = _tail_mass(tag, params, grid) > TRUNCATION_TOL
    return Potential(
        grid=grid,
        samples=V,
        analytic_tag=tag,
        params={k: float(v) for k, v in params.items()},
        deriv_samples=dV,
        jumps=tuple(jumps),
        decay_warning=warning,
    )


def _tail_mass(tag: str, params: dict, grid: UniformGrid) -> float:
    """(1+|x|)^2-weighted |V| mass outside the grid window, by direct sum."""
    if tag in ("free", "square_well", "bump"):
        # compactly supported: zero tail once the support fits the window
        if tag == "square_well" and params["width"] / 2.0 > min(-grid.x0, grid.x1):
            return np.inf
        if tag == "bump" and params.get("radius", 1.0) > min(-grid.x0, grid.x1):
            return np.inf
        return 0.0
    R = min(-grid.x0, grid.x1)
    du = 0.05
    u = R + du * np.arange(20000)
    Vr = np.abs(_eval_tag(tag, params, u)[0]) * _tail_weight(u)
    Vl = np.abs(_eval_tag(tag, params, -u)[0]) * _tail_weight(u)
    return float((np.sum(Vr) + np.sum(Vl)) * du)


def integrand_jumps(V: Potential, smooth, smooth_deriv, weight, weight_deriv):
    """Jump records for integrands f = weight * V * smooth.

    weight/weight_deriv and smooth/smooth_deriv are arrays over the grid (the
    continuous factors); the jumps come from V alone:
        [f]  = w * [V] * s,   [f'] = (w's + w s') [V] + w s [V'].
    Values at the jump node use the stored (half-value-safe) samples of the
    smooth factors, which are continuous there.
    """
    out = []
    for j in V.jumps:
        i = j.index
        w, wp = weight[i], weight_deriv[i]
        s = smooth[i] if smooth is not None else 1.0
        sp = smooth_deriv[i] if smooth_deriv is not None else 0.0
        out.append(Jump(i, w * np.asarray(j.df) * s,
                        (wp * s + w * sp) * np.asarray(j.df) + w * s * np.asarray(j.dfp)))
    return out
