"""Experiment configuration and stage orchestration.

Configs are INI files (human-editable key-value sections). A full run walks
scatter -> marchenko -> kernels -> verify with cache reuse and writes a
manifest.json recording inputs, hashes, versions and every check's verdict.
"""
from __future__ import annotations

import configparser
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cache as cache_mod
from .grids import UniformGrid
from .jost import solve_jost
from .marchenko import solve_marchenko, weighted_B_bounds
from .potential import Potential, reference_potential
from .scattering import scattering_coefficients
from .speccalc import (SpectralCalculator, apply_multiplier, assemble_kernel,
                       band_k_grid, hoermander_norm, make_dyadic, multiplier)


class ConfigError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


_MULTIPLIER_TAGS = ("identity", "imaginary_power", "heat", "custom")
_PARAM_KEYS = {"depth", "width", "amplitude", "scale", "radius", "center"}


@dataclass
class ExperimentConfig:
    potential_tag: str
    potential_params: dict
    x_half_width: float
    dx: float
    k_max: float
    dk: float
    k_include_zero: bool
    j_lo: int
    j_hi: int
    multiplier_tag: str
    multiplier_params: dict
    jost_tol: float
    marchenko_tol: float
    output_dir: str
    cache_dir: str | None
    seed: int
    jobs: int
    verify_params: dict = field(default_factory=dict)

    @staticmethod
    def load(path) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        read = cp.read(path)
        if not read:
            raise ConfigError("bad_config", f"config file {path} not found")
        try:
            pot = cp["potential"]
            tag = pot.get("tag", "free")
            params = {k: pot.getfloat(k) for k in pot if k in _PARAM_KEYS}
            grids = cp["grids"] if "grids" in cp else {}
            dy = cp["dyadic"] if "dyadic" in cp else {}
            mul = cp["multiplier"] if "multiplier" in cp else {}
            tol = cp["tolerances"] if "tolerances" in cp else {}
            out = cp["output"] if "output" in cp else {}
            run = cp["run"] if "run" in cp else {}
            mtag = mul.get("tag", "identity") if hasattr(mul, "get") else "identity"
            mparams = {}
            if hasattr(mul, "get"):
                for key in ("gamma", "t"):
                    if key in mul:
                        mparams[key] = float(mul.get(key))
            cfg = ExperimentConfig(
                potential_tag=tag,
                potential_params=params,
                x_half_width=float(grids.get("x_half_width", 10.0)),
                dx=float(grids.get("dx", 0.01)),
                k_max=float(grids.get("k_max", 8.0)),
                dk=float(grids.get("dk", 0.05)),
                k_include_zero=str(grids.get("k_include_zero", "true")).lower() == "true",
                j_lo=int(dy.get("j_lo", -6)),
                j_hi=int(dy.get("j_hi", 6)),
                multiplier_tag=mtag,
                multiplier_params=mparams,
                jost_tol=float(tol.get("jost_tol", 1e-10)),
                marchenko_tol=float(tol.get("marchenko_tol", 1e-10)),
                output_dir=str(out.get("directory", "artifacts")),
                cache_dir=(str(run.get("cache")) if hasattr(run, "get") and run.get("cache") else None),
                seed=int(run.get("seed", 12345)),
                jobs=int(run.get("jobs", 1)),
                verify_params={k: v for k, v in (cp["verify"].items() if "verify" in cp else [])},
            )
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("bad_config", f"malformed config: {exc}") from exc
        cfg.validate()
        return cfg

    def validate(self):
        if self.potential_tag not in ("free", "square_well", "sech2", "gaussian", "bump"):
            raise ConfigError("bad_potential", f"unknown potential tag {self.potential_tag!r}")
        if self.multiplier_tag not in _MULTIPLIER_TAGS:
            raise ConfigError("bad_multiplier", f"unknown multiplier tag {self.multiplier_tag!r}")
        if self.dx <= 0 or self.dk <= 0 or self.jost_tol <= 0 or self.marchenko_tol <= 0:
            raise ConfigError("bad_config", "steps and tolerances must be positive")
        if self.j_lo >= self.j_hi:
            raise ConfigError("bad_config", "need j_lo < j_hi")
        # Nyquist for the scatter-stage export grid against the kernel window
        need = 2.0 * np.pi / (8.0 * 6.0 * self.x_half_width)
        if self.dk > need * 8:
            raise ConfigError("bad_grid",
                              f"dk = {self.dk} too coarse for the window "
                              f"(kernel-stage quadrature needs about {need:.4g})")

    def grid(self) -> UniformGrid:
        return UniformGrid.symmetric(self.x_half_width, self.dx)

    def k_grid(self) -> np.ndarray:
        ks = np.arange(self.dk, self.k_max + self.dk / 2, self.dk)
        if self.k_include_zero:
            ks = np.concatenate([[0.0], ks])
        return ks

    def potential(self) -> Potential:
        return reference_potential(self.potential_tag, self.potential_params, self.grid())

    def multiplier(self):
        return multiplier(self.multiplier_tag, **self.multiplier_params)


def run(config: ExperimentConfig, stages=("scatter", "marchenko", "kernel", "verify")) -> dict:
    """Execute the requested stages; returns the manifest dict (also written)."""
    t_start = time.perf_counter()
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    V = config.potential()
    manifest = {
        "potential": {"tag": config.potential_tag, "params": config.potential_params,
                      "hash": V.hash},
        "versions": _versions(),
        "seed": config.seed,
        "stages": {},
        "verdicts": [],
    }
    stage_times = {}

    jost = None
    scat = None
    if "scatter" in stages or "kernel" in stages:
        t0 = time.perf_counter()
        k = config.k_grid()
        jost = None
        if config.cache_dir:
            jost = cache_mod.load_jost(config.cache_dir, V, k, config.jost_tol)
            manifest["stages"]["scatter_cache_hit"] = jost is not None
        if jost is None:
            jost = solve_jost(V, k, tol=config.jost_tol)
            if config.cache_dir:
                cache_mod.save_jost(config.cache_dir, jost)
        scat = scattering_coefficients(V, jost)
        scat.export_csv(out / "scattering.csv")
        (out / "scattering.json").write_text(json.dumps(scat.manifest(), indent=1))
        manifest["stages"]["scatter"] = scat.manifest()
        stage_times["scatter"] = time.perf_counter() - t0

    if "marchenko" in stages:
        t0 = time.perf_counter()
        mk = solve_marchenko(V, tol=config.marchenko_tol)
        for n in (0, 1):
            tab = weighted_B_bounds(mk, n)
            _write_table(out / f"marchenko_bounds_n{n}.csv",
                         {"x": tab["x"], "table_plus": tab["table_plus"],
                          "table_minus": tab["table_minus"],
                          "ratio_plus": tab["ratio_plus"],
                          "ratio_minus": tab["ratio_minus"]})
        manifest["stages"]["marchenko"] = {
            "iterations": mk.iteration_count, "residual": mk.residual,
        }
        stage_times["marchenko"] = time.perf_counter() - t0

    if "kernel" in stages:
        t0 = time.perf_counter()
        sysd = make_dyadic(config.j_lo, config.j_hi)
        half = min(8.0, config.x_half_width)
        m = int(round(half / (10 * config.dx)))
        xk = (10 * config.dx) * np.arange(-m, m + 1)
        j_mid = (config.j_lo + config.j_hi) // 2
        win = sysd.window_phi_j(j_mid)
        lam = band_k_grid(win, xk, xk)
        jost_b = None
        if config.cache_dir:
            jost_b = cache_mod.load_jost(config.cache_dir, V, lam, config.jost_tol)
            manifest["stages"]["kernel_cache_hit"] = jost_b is not None
        if jost_b is None:
            jost_b = solve_jost(V, lam, tol=config.jost_tol)
            if config.cache_dir:
                cache_mod.save_jost(config.cache_dir, jost_b)
        scat_b = scattering_coefficients(V, jost_b)
        K = assemble_kernel(win, j_mid, scat_b, jost_b, xk, xk)
        np.savetxt(out / f"kernel_phi_{j_mid}.csv", K.values, delimiter=",")
        manifest["stages"]["kernel"] = {
            "j": j_mid, "symmetry_residual": K.symmetry_residual(),
            "n_lambda": len(K.k_grid),
        }
        stage_times["kernel"] = time.perf_counter() - t0

    if "verify" in stages:
        t0 = time.perf_counter()
        verdicts = run_verify(config, V, out)
        manifest["verdicts"] = verdicts
        stage_times["verify"] = time.perf_counter() - t0

    manifest["stage_seconds"] = stage_times
    manifest["total_seconds"] = time.perf_counter() - t_start
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True,
                                                  default=_json_default))
    return manifest


def run_verify(config: ExperimentConfig, V: Potential, out: Path,
               which: str = "wl2") -> list:
    from .verify import (check_kernel_tail_L1, check_pointwise_decay,
                         check_weighted_L2, cz_decompose, spike_train_family,
                         weak11_experiment, window_profile_h1_bump)
    from .verify.besov import besov_norm

    verdicts = []
    calc = SpectralCalculator(V) if V.analytic_tag != "free" else None
    which = config.verify_params.get("checks", which)
    names = [w.strip() for w in which.split(",")]
    for name in names:
        if name == "wl2":
            s = float(config.verify_params.get("s", 1.0))
            js = range(int(config.verify_params.get("wl2_j_lo", -6)),
                       int(config.verify_params.get("wl2_j_hi", 6)) + 1)
            claimed = (s - 0.5) / 2.0 if V.analytic_tag == "free" else None
            rep = check_weighted_L2(V, window_profile_h1_bump, s, js,
                                    slope_claimed=claimed, calc=calc)
        elif name == "decay":
            rep = check_pointwise_decay(V, range(int(config.verify_params.get("decay_j_lo", -4)),
                                                 int(config.verify_params.get("decay_j_hi", 7))),
                                        calc=calc)
        elif name == "weak11":
            mu = config.multiplier()
            x = V.x
            fam = spike_train_family(x, n_members=int(config.verify_params.get("members", 8)),
                                     seed=config.seed)
            alphas = np.geomspace(1e-3, 10.0, 25)
            rep = weak11_experiment(mu, V, fam, alphas,
                                    (config.j_lo, config.j_hi), calc=calc)
        elif name == "cz":
            rng = np.random.default_rng(config.seed)
            f = np.abs(rng.standard_normal(1024))
            alpha = float(np.mean(f) * 2.0)
            cz = cz_decompose(f, alpha, V.grid.dx)
            from .verify.report import EstimateReport

            rep = EstimateReport(estimate_id="cz", sup_ratio=cz.total_cube_length()
                                 * alpha / max(np.sum(np.abs(f)) * V.grid.dx, 1e-300))
            rep.passed = bool(rep.sup_ratio <= 1.0 + 1e-12)
            rep.criterion = "sum |I_k| <= ||f||_1 / alpha"
            rep.rows = [{"cubes": len(cz.cubes), "alpha": alpha}]
        elif name == "besov":
            mu = config.multiplier()
            x = V.x
            f = np.exp(-x * x)
            val, rows = besov_norm(f, 0.0, 2, 2, V, (config.j_lo, config.j_hi), calc=calc)
            from .verify.report import EstimateReport

            rep = EstimateReport(estimate_id="besov", rows=rows, sup_ratio=val)
            rep.passed = bool(np.isfinite(val))
            rep.criterion = "finite B^{0,2}_2 window norm"
        elif name == "tails":
            mu = config.multiplier()
            j_I = int(config.verify_params.get("j_i", 2))
            t = 2.0 ** (-j_I / 2.0)
            rep = check_kernel_tail_L1(mu, V, (0.0, t), j_I,
                                       range(j_I - 2, j_I + 6), calc=calc)
        else:
            raise ConfigError("bad_verify", f"unknown verify subcommand {name!r}")
        rep.write(out, stem=f"verify_{name}")
        verdicts.append(rep.verdict())
    return verdicts


def _write_table(path, columns: dict):
    import csv

    keys = list(columns.keys())
    n = len(next(iter(columns.values())))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(keys)
        for i in range(n):
            w.writerow([repr(float(columns[k][i])) for k in keys])


def _versions() -> dict:
    import numpy
    import scipy

    from . import __version__

    return {"jostkit": __version__, "numpy": numpy.__version__, "scipy": scipy.__version__}


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, complex):
        return [v.real, v.imag]
    return str(v)
