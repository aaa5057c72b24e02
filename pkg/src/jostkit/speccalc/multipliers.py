"""Spectral multiplier library: identity, imaginary powers, heat, sampled."""
from __future__ import annotations

import numpy as np


def multiplier(tag: str, **params):
    """Multiplier callable by tag; values at energy xi (scalar or array).

    imaginary_power is |xi|^{i gamma} with the measure-zero value mu(0) := 0
    (the phase has no limit there; the choice never affects an integral).
    """
    if tag == "identity":
        return lambda xi: np.ones_like(np.asarray(xi, dtype=float))
    if tag == "imaginary_power":
        gamma = float(params["gamma"])

        def mu(xi):
            xi = np.asarray(xi, dtype=float)
            out = np.zeros(np.shape(xi), dtype=complex)
            nz = np.abs(xi) > 0
            out[nz] = np.exp(1j * gamma * np.log(np.abs(xi[nz])))
            return out if out.ndim else complex(out)

        return mu
    if tag == "heat":
        t = float(params["t"])
        return lambda xi: np.exp(-t * np.asarray(xi, dtype=float))
    if tag == "custom":
        xs = np.asarray(params["xi"], dtype=float)
        vs = np.asarray(params["values"])

        def mu_c(xi):
            xi = np.asarray(xi, dtype=float)
            if np.any(xi < xs[0] - 1e-12) or np.any(xi > xs[-1] + 1e-12):
                raise ValueError("sampled multiplier evaluated outside its support")
            re = np.interp(xi, xs, vs.real)
            if np.iscomplexobj(vs):
                return re + 1j * np.interp(xi, xs, vs.imag)
            return re

        return mu_c
    raise ValueError(f"unknown multiplier tag {tag!r}")
