"""Hash-keyed array cache: float64/complex128 little-endian binaries + JSON manifests."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np


def cache_key(spec: dict) -> str:
    blob = json.dumps(spec, sort_keys=True, default=_canon).encode()
    return hashlib.sha256(blob).hexdigest()[:20]


def _canon(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not canonicalizable: {type(v)}")


def store_arrays(directory, key: str, arrays: dict, manifest: dict) -> Path:
    d = Path(directory) / key
    d.mkdir(parents=True, exist_ok=True)
    names = {}
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        dtype = "<c16" if np.iscomplexobj(arr) else "<f8"
        (d / f"{name}.bin").write_bytes(np.ascontiguousarray(arr).astype(dtype).tobytes())
        names[name] = {"dtype": dtype, "shape": list(arr.shape)}
    payload = {"arrays": names, "manifest": manifest}
    (d / "manifest.json").write_text(json.dumps(payload, indent=1, sort_keys=True,
                                                default=_canon))
    return d


def load_arrays(directory, key: str):
    d = Path(directory) / key
    mf = d / "manifest.json"
    if not mf.exists():
        return None
    payload = json.loads(mf.read_text())
    arrays = {}
    for name, meta in payload["arrays"].items():
        raw = (d / f"{name}.bin").read_bytes()
        arrays[name] = np.frombuffer(raw, dtype=meta["dtype"]).reshape(meta["shape"]).copy()
    return arrays, payload["manifest"]


def jost_cache_key(V, k_grid, tol) -> str:
    return cache_key({"kind": "jost", "potential": V.hash,
                      "grid": V.grid.spec(), "k": np.asarray(k_grid), "tol": tol})


def save_jost(directory, field) -> str:
    key = jost_cache_key(field.potential, field.k_grid, field.tol)
    arrays = {
        "k_grid": field.k_grid, "m_plus": field.m_plus, "m_minus": field.m_minus,
        "mp_plus": field.mp_plus, "mp_minus": field.mp_minus,
        "residual": field.residual,
        "iterations": field.iteration_count.astype(float),
        "ext_plus": np.stack(field.ext_plus), "ext_minus": np.stack(field.ext_minus),
    }
    if field.dm_plus is not None:
        arrays["dm_plus"] = field.dm_plus
        arrays["dm_minus"] = field.dm_minus
    store_arrays(directory, key, arrays,
                 {"potential": field.potential.hash, "tol": field.tol,
                  "grid": field.x_grid.spec()})
    return key


def load_jost(directory, V, k_grid, tol):
    from .jost import JostField

    key = jost_cache_key(V, k_grid, tol)
    hit = load_arrays(directory, key)
    if hit is None:
        return None
    arrays, manifest = hit
    if manifest["potential"] != V.hash:
        return None
    field = JostField(
        potential=V, x_grid=V.grid, k_grid=arrays["k_grid"].real,
        m_plus=arrays["m_plus"], m_minus=arrays["m_minus"],
        mp_plus=arrays["mp_plus"], mp_minus=arrays["mp_minus"],
        dm_plus=arrays.get("dm_plus"), dm_minus=arrays.get("dm_minus"),
        iteration_count=arrays["iterations"].real.astype(int),
        residual=arrays["residual"].real, tol=tol,
        k0_flagged=bool(np.any(arrays["k_grid"].real == 0.0)),
        ext_plus=tuple(arrays["ext_plus"]), ext_minus=tuple(arrays["ext_minus"]),
    )
    return field
