"""Scenario documents: parsing, validation, execution, serialization.

A scenario is a single strict-JSON document (UTF-8, no comments,
unknown keys rejected) that pins down every input of a run — matrices,
times, seeds, tolerances, search settings — so that reruns are
byte-identical.  Complex numbers travel as [re, im] pairs.  Results
come back as a JSON summary plus CSV tables whose first column is
always `time`, rendered with 17 significant digits.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import classical as cl
from .emergence import decay_rate_fit, generic_state, survival_fractions
from .errors import (
    InsufficientData,
    ScenarioParseError,
    ScenarioValidationError,
)
from .evolution import evolve_a, evolve_b, q_matrix_element
from .hamiltonians import random_diagonalizable, standard_2x2
from .linalg import (
    DEFAULT_COND_CEILING,
    DEFAULT_MAG_CEILING,
    DEFAULT_TOL_RECON,
    commutator_norm,
    eig_decompose,
)
from .maximize import (
    analytic_maximize,
    effective_generator_check,
    numeric_maximize,
    observable_seeds,
    verify_reality,
)
from .qmetric import build_q, q_adjoint, q_angle, random_q_hermitian

KINDS = ("quantum", "classical", "inflaton")

DEFAULT_TOLERANCES = {
    "tol_recon": DEFAULT_TOL_RECON,
    "cond_ceiling": DEFAULT_COND_CEILING,
    "mag_ceiling": DEFAULT_MAG_CEILING,
    "deg_tol": None,  # null = auto (1e-9 * max(1, |max_im|))
    "reality_tol": 1e-8,
    "denom_floor": 1e-12,
    "herm_tol": 1e-10,
}
DEFAULT_MAXIMIZE = {"restarts": 4, "max_iters": 2000, "step_tol": 1e-13}
DEFAULT_TIMES = {"t_a": 0.0, "t_b": 1.0, "grid_points": 10}


@dataclass(frozen=True)
class Scenario:
    """Validated, fully defaulted run description (JSON-plain fields)."""

    kind: str
    seed: int
    hamiltonian: dict | None = None
    times: dict | None = None
    observables: dict | None = None
    initial_state: list | None = None
    tolerances: dict | None = None
    maximize: dict | None = None
    classical: dict | None = None
    search: dict | None = None
    inflaton: dict | None = None


@dataclass(frozen=True)
class ResultBundle:
    """Summary record plus named CSV tables, both deterministic."""

    summary: dict
    tables: dict

    def summary_json(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True) + "\n"

    def write(self, outdir: str) -> list:
        os.makedirs(outdir, exist_ok=True)
        paths = []
        spath = os.path.join(outdir, "summary.json")
        with open(spath, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.summary_json())
        paths.append(spath)
        for name in sorted(self.tables):
            tpath = os.path.join(outdir, name)
            with open(tpath, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(self.tables[name])
            paths.append(tpath)
        return paths


# ---------------------------------------------------------------------------
# parsing


def _parse_err(path: str, msg: str) -> ScenarioParseError:
    return ScenarioParseError(f"{path}: {msg}")


def _check_keys(obj: dict, allowed: dict, path: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise _parse_err(path, f"unknown key(s) {unknown}; allowed: {sorted(allowed)}")


def _as_obj(x, path: str) -> dict:
    if not isinstance(x, dict):
        raise _parse_err(path, f"expected an object, got {type(x).__name__}")
    return x


def _as_number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise _parse_err(path, f"expected a number, got {x!r}")
    if not math.isfinite(x):
        raise _parse_err(path, f"expected a finite number, got {x!r}")
    return float(x)


def _as_int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise _parse_err(path, f"expected an integer, got {x!r}")
    return x


def _as_pair(x, path: str) -> list:
    if (
        not isinstance(x, list)
        or len(x) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in x)
    ):
        raise _parse_err(path, f"expected a [re, im] pair of numbers, got {x!r}")
    if not all(math.isfinite(v) for v in x):
        raise _parse_err(path, "complex entry must be finite")
    return [float(x[0]), float(x[1])]


def _as_vector(x, path: str) -> list:
    if not isinstance(x, list) or not x:
        raise _parse_err(path, "expected a nonempty list of [re, im] pairs")
    return [_as_pair(v, f"{path}[{k}]") for k, v in enumerate(x)]


def _as_real_vector(x, path: str) -> list:
    if not isinstance(x, list) or not x:
        raise _parse_err(path, "expected a nonempty list of numbers")
    return [_as_number(v, f"{path}[{k}]") for k, v in enumerate(x)]


def _positive(v: float, path: str) -> float:
    if not v > 0:
        raise ScenarioValidationError(f"{path} must be positive, got {v!r}")
    return v


def _parse_hamiltonian(obj, path: str) -> dict:
    obj = _as_obj(obj, path)
    _check_keys(obj, {"matrix": 1, "generator": 1}, path)
    has_matrix = "matrix" in obj
    has_gen = "generator" in obj
    if has_matrix == has_gen:
        raise ScenarioValidationError(
            f"{path}: exactly one of 'matrix' or 'generator' is required"
        )
    if has_matrix:
        rows = obj["matrix"]
        if not isinstance(rows, list) or not rows:
            raise _parse_err(f"{path}.matrix", "expected a nonempty list of rows")
        parsed = [_as_vector(r, f"{path}.matrix[{k}]") for k, r in enumerate(rows)]
        if any(len(r) != len(parsed) for r in parsed):
            raise ScenarioValidationError(f"{path}.matrix must be square")
        return {"matrix": parsed}
    gen = _as_obj(obj["generator"], f"{path}.generator")
    name = gen.get("name")
    if name == "standard_2x2":
        _check_keys(gen, {"name": 1}, f"{path}.generator")
        return {"generator": {"name": "standard_2x2"}}
    if name == "random_diagonalizable":
        _check_keys(
            gen, {"name": 1, "dim": 1, "seed": 1, "im_spread": 1}, f"{path}.generator"
        )
        dim = _as_int(gen.get("dim", 4), f"{path}.generator.dim")
        gseed = _as_int(gen.get("seed", 0), f"{path}.generator.seed")
        spread = _as_number(gen.get("im_spread", 1.0), f"{path}.generator.im_spread")
        if dim < 2:
            raise ScenarioValidationError(f"{path}.generator.dim must be >= 2")
        _positive(spread, f"{path}.generator.im_spread")
        return {
            "generator": {
                "name": "random_diagonalizable",
                "dim": dim,
                "seed": gseed,
                "im_spread": spread,
            }
        }
    raise _parse_err(
        f"{path}.generator.name",
        f"unknown generator {name!r}; expected 'standard_2x2' or 'random_diagonalizable'",
    )


def _parse_times(obj, path: str) -> dict:
    if obj is None:
        return dict(DEFAULT_TIMES)
    obj = _as_obj(obj, path)
    _check_keys(obj, {"t_a": 1, "t_b": 1, "grid_points": 1}, path)
    out = {
        "t_a": _as_number(obj.get("t_a", DEFAULT_TIMES["t_a"]), f"{path}.t_a"),
        "t_b": _as_number(obj.get("t_b", DEFAULT_TIMES["t_b"]), f"{path}.t_b"),
        "grid_points": _as_int(
            obj.get("grid_points", DEFAULT_TIMES["grid_points"]), f"{path}.grid_points"
        ),
    }
    if not out["t_b"] > out["t_a"]:
        raise ScenarioValidationError(f"{path}: t_b must exceed t_a")
    if out["grid_points"] < 2:
        raise ScenarioValidationError(f"{path}.grid_points must be >= 2")
    return out


def _parse_observables(obj, path: str, fallback_seed: int) -> dict:
    if obj is None:
        return {"count": 20, "seed": fallback_seed}
    obj = _as_obj(obj, path)
    _check_keys(obj, {"count": 1, "seed": 1}, path)
    count = _as_int(obj.get("count", 20), f"{path}.count")
    oseed = _as_int(obj.get("seed", fallback_seed), f"{path}.seed")
    if count < 1:
        raise ScenarioValidationError(f"{path}.count must be >= 1")
    return {"count": count, "seed": oseed}


def _parse_tolerances(obj, path: str) -> dict:
    out = dict(DEFAULT_TOLERANCES)
    if obj is None:
        return out
    obj = _as_obj(obj, path)
    _check_keys(obj, DEFAULT_TOLERANCES, path)
    for key, val in obj.items():
        if key == "deg_tol" and val is None:
            out[key] = None
            continue
        out[key] = _positive(_as_number(val, f"{path}.{key}"), f"{path}.{key}")
    return out


def _parse_maximize(obj, path: str) -> dict:
    out = dict(DEFAULT_MAXIMIZE)
    if obj is None:
        return out
    obj = _as_obj(obj, path)
    _check_keys(obj, DEFAULT_MAXIMIZE, path)
    if "restarts" in obj:
        out["restarts"] = _as_int(obj["restarts"], f"{path}.restarts")
    if "max_iters" in obj:
        out["max_iters"] = _as_int(obj["max_iters"], f"{path}.max_iters")
    if "step_tol" in obj:
        out["step_tol"] = _positive(
            _as_number(obj["step_tol"], f"{path}.step_tol"), f"{path}.step_tol"
        )
    if out["restarts"] < 1 or out["max_iters"] < 1:
        raise ScenarioValidationError(f"{path}: restarts and max_iters must be >= 1")
    return out


_CLASSICAL_KEYS = {
    "masses": 1,
    "poly_coeffs": 1,
    "couplings": 1,
    "bumps": 1,
    "dt": 1,
    "horizon": 1,
    "bound": 1,
    "table_stride": 1,
    "initial": 1,
    "dwell": 1,
}


def _parse_classical(obj, path: str) -> dict:
    obj = _as_obj(obj, path)
    _check_keys(obj, _CLASSICAL_KEYS, path)
    if "masses" not in obj or "poly_coeffs" not in obj:
        raise _parse_err(path, "requires 'masses' and 'poly_coeffs'")
    masses = _as_real_vector(obj["masses"], f"{path}.masses")
    n = len(masses)
    for k, m in enumerate(masses):
        _positive(m, f"{path}.masses[{k}]")
    rows = obj["poly_coeffs"]
    if not isinstance(rows, list) or len(rows) != n:
        raise _parse_err(f"{path}.poly_coeffs", f"expected {n} coefficient rows")
    coeffs = []
    for k, row in enumerate(rows):
        vals = _as_real_vector(row, f"{path}.poly_coeffs[{k}]")
        if len(vals) != 7:
            raise _parse_err(
                f"{path}.poly_coeffs[{k}]", "expected 7 coefficients (powers 0..6)"
            )
        coeffs.append(vals)
    couplings = []
    for k, c in enumerate(obj.get("couplings", [])):
        cpath = f"{path}.couplings[{k}]"
        if not isinstance(c, list) or len(c) != 3:
            raise _parse_err(cpath, "expected [i, j, coefficient]")
        i = _as_int(c[0], f"{cpath}[0]")
        j = _as_int(c[1], f"{cpath}[1]")
        cc = _as_number(c[2], f"{cpath}[2]")
        if not (0 <= i < n and 0 <= j < n and i != j):
            raise ScenarioValidationError(f"{cpath}: bad coordinate indices")
        couplings.append([i, j, cc])
    bumps = []
    for k, b in enumerate(obj.get("bumps", [])):
        bpath = f"{path}.bumps[{k}]"
        b = _as_obj(b, bpath)
        _check_keys(b, {"center_q": 1, "center_p": 1, "sigma": 1, "weight": 1}, bpath)
        cq = _as_real_vector(b.get("center_q", [0.0] * n), f"{bpath}.center_q")
        cp = _as_real_vector(b.get("center_p", [0.0] * n), f"{bpath}.center_p")
        if len(cq) != n or len(cp) != n:
            raise ScenarioValidationError(f"{bpath}: centers must have {n} coordinates")
        sigma = _positive(_as_number(b.get("sigma", 0.25), f"{bpath}.sigma"), f"{bpath}.sigma")
        weight = _as_number(b.get("weight", 1.0), f"{bpath}.weight")
        bumps.append({"center_q": cq, "center_p": cp, "sigma": sigma, "weight": weight})
    out = {
        "masses": masses,
        "poly_coeffs": coeffs,
        "couplings": couplings,
        "bumps": bumps,
        "dt": _positive(_as_number(obj.get("dt", 1e-3), f"{path}.dt"), f"{path}.dt"),
        "horizon": _positive(
            _as_number(obj.get("horizon", 20.0), f"{path}.horizon"), f"{path}.horizon"
        ),
        "bound": _positive(
            _as_number(obj.get("bound", cl.BLOWUP_BOUND), f"{path}.bound"), f"{path}.bound"
        ),
        "table_stride": _as_int(obj.get("table_stride", 10), f"{path}.table_stride"),
    }
    if out["table_stride"] < 1:
        raise ScenarioValidationError(f"{path}.table_stride must be >= 1")
    if "initial" in obj:
        ini = _as_obj(obj["initial"], f"{path}.initial")
        _check_keys(ini, {"q": 1, "p": 1}, f"{path}.initial")
        q = _as_real_vector(ini.get("q"), f"{path}.initial.q")
        p = _as_real_vector(ini.get("p"), f"{path}.initial.p")
        if len(q) != n or len(p) != n:
            raise ScenarioValidationError(f"{path}.initial must have {n} coordinates")
        out["initial"] = {"q": q, "p": p}
    if "dwell" in obj:
        dw = _as_obj(obj["dwell"], f"{path}.dwell")
        _check_keys(dw, {"delta": 1, "big_delta": 1, "lyapunov": 1, "dt": 1}, f"{path}.dwell")
        delta = _positive(_as_number(dw.get("delta", 1e-6), f"{path}.dwell.delta"),
                          f"{path}.dwell.delta")
        big = _positive(_as_number(dw.get("big_delta", 0.1), f"{path}.dwell.big_delta"),
                        f"{path}.dwell.big_delta")
        lyap = _positive(_as_number(dw.get("lyapunov", 1.0), f"{path}.dwell.lyapunov"),
                         f"{path}.dwell.lyapunov")
        ddt = _positive(_as_number(dw.get("dt", 1e-3), f"{path}.dwell.dt"),
                        f"{path}.dwell.dt")
        if delta > big:
            raise ScenarioValidationError(f"{path}.dwell: delta must be <= big_delta")
        out["dwell"] = {"delta": delta, "big_delta": big, "lyapunov": lyap, "dt": ddt}
    return out


def _parse_search(obj, path: str, n_dims: int | None) -> dict:
    obj = _as_obj(obj, path)
    allowed = {
        "bounds": 1,
        "restarts": 1,
        "seed": 1,
        "max_evals": 1,
        "simplex_tol": 1,
        "grid_presearch": 1,
    }
    _check_keys(obj, allowed, path)
    if "bounds" not in obj:
        raise _parse_err(path, "requires 'bounds' ([lo, hi] per phase-space coordinate)")
    raw = obj["bounds"]
    if not isinstance(raw, list) or not raw:
        raise _parse_err(f"{path}.bounds", "expected a list of [lo, hi] pairs")
    bounds = [_as_pair(b, f"{path}.bounds[{k}]") for k, b in enumerate(raw)]
    for k, (lo, hi) in enumerate(bounds):
        if not hi > lo:
            raise ScenarioValidationError(f"{path}.bounds[{k}]: need lo < hi")
    if n_dims is not None and len(bounds) != 2 * n_dims:
        raise ScenarioValidationError(
            f"{path}.bounds must have {2 * n_dims} pairs (q then p coordinates)"
        )
    out = {
        "bounds": bounds,
        "restarts": _as_int(obj.get("restarts", 4), f"{path}.restarts"),
        "seed": _as_int(obj.get("seed", 0), f"{path}.seed"),
        "max_evals": _as_int(obj.get("max_evals", 400), f"{path}.max_evals"),
        "simplex_tol": _positive(
            _as_number(obj.get("simplex_tol", 1e-9), f"{path}.simplex_tol"),
            f"{path}.simplex_tol",
        ),
        "grid_presearch": _as_int(obj.get("grid_presearch", 0), f"{path}.grid_presearch"),
    }
    if out["restarts"] < 1 or out["max_evals"] < 1:
        raise ScenarioValidationError(f"{path}: restarts and max_evals must be >= 1")
    if out["grid_presearch"] < 0:
        raise ScenarioValidationError(f"{path}.grid_presearch must be >= 0")
    return out


def _parse_inflaton(obj, path: str) -> dict:
    obj = _as_obj(obj, path)
    allowed = {
        "n_modes": 1,
        "mode_curvature": 1,
        "horizon": 1,
        "dt": 1,
        "delta": 1,
        "exit_radius": 1,
        "bump_sigma": 1,
        "bump_weight": 1,
        "table_stride": 1,
    }
    _check_keys(obj, allowed, path)
    if "n_modes" not in obj:
        raise _parse_err(path, "requires 'n_modes'")
    out = {
        "n_modes": _as_int(obj["n_modes"], f"{path}.n_modes"),
        "mode_curvature": _positive(
            _as_number(obj.get("mode_curvature", 1.0), f"{path}.mode_curvature"),
            f"{path}.mode_curvature",
        ),
        "horizon": _positive(
            _as_number(obj.get("horizon", 20.0), f"{path}.horizon"), f"{path}.horizon"
        ),
        "dt": _positive(_as_number(obj.get("dt", 1e-3), f"{path}.dt"), f"{path}.dt"),
        "delta": _positive(
            _as_number(obj.get("delta", 1e-8), f"{path}.delta"), f"{path}.delta"
        ),
        "exit_radius": _positive(
            _as_number(obj.get("exit_radius", 0.1), f"{path}.exit_radius"),
            f"{path}.exit_radius",
        ),
        "bump_sigma": _positive(
            _as_number(obj.get("bump_sigma", 0.25), f"{path}.bump_sigma"),
            f"{path}.bump_sigma",
        ),
        "bump_weight": _as_number(obj.get("bump_weight", 1.0), f"{path}.bump_weight"),
        "table_stride": _as_int(obj.get("table_stride", 10), f"{path}.table_stride"),
    }
    if out["n_modes"] < 1:
        raise ScenarioValidationError(f"{path}.n_modes must be >= 1")
    if out["table_stride"] < 1:
        raise ScenarioValidationError(f"{path}.table_stride must be >= 1")
    if out["delta"] > out["exit_radius"]:
        raise ScenarioValidationError(f"{path}: delta must be <= exit_radius")
    return out


_TOP_KEYS = {
    "quantum": {
        "kind": 1,
        "seed": 1,
        "hamiltonian": 1,
        "times": 1,
        "observables": 1,
        "initial_state": 1,
        "tolerances": 1,
        "maximize": 1,
    },
    "classical": {"kind": 1, "seed": 1, "classical": 1, "search": 1},
    "inflaton": {"kind": 1, "seed": 1, "inflaton": 1, "search": 1},
}


def parse_scenario(text: str, seed_override: int | None = None) -> Scenario:
    """Parse and validate a scenario document.

    Raises :class:`ScenarioParseError` for malformed JSON, wrong types,
    or unknown keys (with a path to the offending field), and
    :class:`ScenarioValidationError` when a well-formed value violates
    an invariant.  All defaults are filled, so serialize/parse round-trips.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    doc = _as_obj(doc, "$")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioValidationError(f"$.kind must be one of {list(KINDS)}, got {kind!r}")
    _check_keys(doc, _TOP_KEYS[kind], "$")
    seed = _as_int(doc.get("seed", 0), "$.seed")
    if seed_override is not None:
        seed = int(seed_override)

    if kind == "quantum":
        if "hamiltonian" not in doc:
            raise _parse_err("$", "quantum scenario requires 'hamiltonian'")
        initial = doc.get("initial_state")
        if initial is not None:
            initial = _as_vector(initial, "$.initial_state")
        return Scenario(
            kind=kind,
            seed=seed,
            hamiltonian=_parse_hamiltonian(doc["hamiltonian"], "$.hamiltonian"),
            times=_parse_times(doc.get("times"), "$.times"),
            observables=_parse_observables(doc.get("observables"), "$.observables", seed),
            initial_state=initial,
            tolerances=_parse_tolerances(doc.get("tolerances"), "$.tolerances"),
            maximize=_parse_maximize(doc.get("maximize"), "$.maximize"),
        )
    if kind == "classical":
        if "classical" not in doc:
            raise _parse_err("$", "classical scenario requires 'classical'")
        classical = _parse_classical(doc["classical"], "$.classical")
        n = len(classical["masses"])
        search = doc.get("search")
        if search is not None:
            search = _parse_search(search, "$.search", n)
        return Scenario(kind=kind, seed=seed, classical=classical, search=search)
    if "inflaton" not in doc:
        raise _parse_err("$", "inflaton scenario requires 'inflaton'")
    inflaton = _parse_inflaton(doc["inflaton"], "$.inflaton")
    search = doc.get("search")
    if search is not None:
        search = _parse_search(search, "$.search", inflaton["n_modes"])
    return Scenario(kind="inflaton", seed=seed, inflaton=inflaton, search=search)


def serialize_scenario(s: Scenario) -> str:
    """Canonical JSON for a scenario; parse(serialize(s)) == s."""
    doc = {"kind": s.kind, "seed": s.seed}
    if s.kind == "quantum":
        doc["hamiltonian"] = s.hamiltonian
        doc["times"] = s.times
        doc["observables"] = s.observables
        doc["tolerances"] = s.tolerances
        doc["maximize"] = s.maximize
        if s.initial_state is not None:
            doc["initial_state"] = s.initial_state
    elif s.kind == "classical":
        doc["classical"] = s.classical
        if s.search is not None:
            doc["search"] = s.search
    else:
        doc["inflaton"] = s.inflaton
        if s.search is not None:
            doc["search"] = s.search
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# execution


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _csv_table(header: list, columns: list) -> str:
    if header[0] != "time":
        raise ValueError("first CSV column must be 'time'")
    rows = [",".join(header)]
    n = len(columns[0])
    for k in range(n):
        rows.append(",".join(_fmt(float(col[k])) for col in columns))
    return "\n".join(rows) + "\n"


def _plain(obj):
    """Recursively convert numpy scalars/arrays for JSON emission."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _complex_pairs(vec: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec).ravel()]


def hamiltonian_matrix(s: Scenario) -> np.ndarray:
    if s.hamiltonian is None:
        raise ScenarioValidationError("scenario has no Hamiltonian section")
    if "matrix" in s.hamiltonian:
        rows = s.hamiltonian["matrix"]
        return np.array([[complex(re, im) for re, im in row] for row in rows])
    gen = s.hamiltonian["generator"]
    if gen["name"] == "standard_2x2":
        return standard_2x2()
    return random_diagonalizable(gen["dim"], gen["seed"], gen["im_spread"])


def classical_spec(s: Scenario) -> cl.ComplexHamiltonianSpec:
    c = s.classical
    return cl.ComplexHamiltonianSpec(
        masses=np.array(c["masses"]),
        poly_coeffs=np.array(c["poly_coeffs"]),
        couplings=tuple((int(i), int(j), float(v)) for i, j, v in c["couplings"]),
        bumps=tuple(
            cl.GaussianBump(
                center_q=np.array(b["center_q"]),
                center_p=np.array(b["center_p"]),
                sigma=b["sigma"],
                weight=b["weight"],
            )
            for b in c["bumps"]
        ),
    )


def search_config(s: Scenario, n_dims: int) -> cl.SearchConfig:
    if s.search is None:
        return cl.SearchConfig(
            bounds=np.tile([-1.2, 1.2], (2 * n_dims, 1)),
            restarts=4,
            seed=s.seed,
            max_evals=200 * 2 * n_dims,
            simplex_tol=1e-9,
            grid_presearch=21 if n_dims == 1 else 3,
        )
    cfg = s.search
    return cl.SearchConfig(
        bounds=np.array(cfg["bounds"]),
        restarts=cfg["restarts"],
        seed=cfg["seed"],
        max_evals=cfg["max_evals"],
        simplex_tol=cfg["simplex_tol"],
        grid_presearch=cfg["grid_presearch"],
    )


def _quantum_bundle(s: Scenario, focus: str) -> ResultBundle:
    tol = s.tolerances
    h = hamiltonian_matrix(s)
    dec = eig_decompose(h, tol_recon=tol["tol_recon"], cond_ceiling=tol["cond_ceiling"])
    metric = build_q(dec)
    t_a, t_b = s.times["t_a"], s.times["t_b"]
    grid = np.linspace(t_a, t_b, s.times["grid_points"])
    h_dag_q = q_adjoint(metric, dec.matrix())
    hnorm = float(np.linalg.norm(h, "fro"))
    vqv = dec.p.conj().T @ metric.q @ dec.p
    summary = {
        "kind": "quantum",
        "dim": dec.dim,
        "eigenvalues": _complex_pairs(dec.lam),
        "max_im": float(dec.max_im),
        "cond_p": float(dec.cond_p),
        "q_metric": {
            "positive_definite": bool(metric.chol_ok),
            "hermiticity_residual": float(
                np.linalg.norm(metric.q - metric.q.conj().T, "fro")
            ),
            "inverse_residual": float(
                np.linalg.norm(metric.q @ metric.q_inv - np.eye(dec.dim), "fro")
            ),
            "eigenbasis_orthonormality_residual": float(
                np.linalg.norm(vqv - np.eye(dec.dim), "fro")
            ),
        },
        "commutator_h_hdagq_rel": float(
            commutator_norm(dec.matrix(), h_dag_q) / max(1e-300, hnorm**2)
        ),
        "times": dict(s.times),
        "seed": s.seed,
    }
    tables = {}

    if focus in ("maximize", "full"):
        deg = tol["deg_tol"]
        ana = analytic_maximize(dec, metric, t_a, t_b, deg_tol=deg)
        num = numeric_maximize(
            dec,
            metric,
            t_a,
            t_b,
            restarts=s.maximize["restarts"],
            seed=s.seed,
            max_iters=s.maximize["max_iters"],
            step_tol=s.maximize["step_tol"],
        )
        rep = verify_reality(
            dec,
            metric,
            ana,
            n_observables=s.observables["count"],
            t_grid=grid,
            seed=s.observables["seed"],
            tol=tol["reality_tol"],
        )
        summary["maximization"] = {
            "amplitude_analytic": float(ana.amplitude),
            "amplitude_numeric": float(num.amplitude),
            "amplitude_theory": float(np.exp(dec.max_im * (t_b - t_a))),
            "analytic_numeric_gap": float(abs(ana.amplitude - num.amplitude)),
            "subspace_dim": int(ana.subspace_dim),
            "a_star": _complex_pairs(ana.a_star),
            "b_star": _complex_pairs(ana.b_star),
            "effective_generator_q_hermitian": bool(
                effective_generator_check(dec, metric, ana, tol=tol["herm_tol"] * 100)
            ),
        }
        summary["reality"] = {
            "observables": int(rep.observables),
            "time_points": int(rep.time_points),
            "max_abs_im": float(rep.max_abs_im),
            "passed": bool(rep.passed),
            "tol": float(rep.tol),
        }
        obs = [
            random_q_hermitian(metric, sd)
            for sd in observable_seeds(s.observables["seed"], s.observables["count"])
        ]
        angles = np.empty(grid.size)
        im_peak = np.empty(grid.size)
        for k, t in enumerate(grid):
            a_t = evolve_a(dec, ana.a_star, t_a, t)
            b_t = evolve_b(dec, metric, ana.b_star, t_b, t, mode="q_dagger")
            angles[k] = q_angle(metric, b_t, a_t)
            im_peak[k] = max(
                abs(
                    q_matrix_element(
                        metric, o, b_t, a_t, denom_floor=tol["denom_floor"]
                    ).imag
                )
                for o in obs
            )
        tables["proportionality.csv"] = _csv_table(
            ["time", "q_angle_b_vs_a", "max_abs_im_weak_value"],
            [grid, angles, im_peak],
        )

    if focus in ("emerge", "full"):
        if s.initial_state is not None:
            psi0 = np.array([complex(re, im) for re, im in s.initial_state])
            if psi0.size != dec.dim:
                raise ScenarioValidationError(
                    f"initial_state has {psi0.size} entries, Hamiltonian dim is {dec.dim}"
                )
        else:
            psi0 = generic_state(dec.dim, seed=s.seed)
        series = survival_fractions(dec, metric, psi0, grid, deg_tol=tol["deg_tol"])
        slopes = {}
        for comp in range(dec.dim):
            if series.top_mask[comp]:
                continue
            try:
                slopes[f"component_{comp}"] = float(decay_rate_fit(series, comp))
            except InsufficientData:
                slopes[f"component_{comp}"] = None
        summary["emergence"] = {
            "initial_state": _complex_pairs(psi0),
            "fidelity_top_final": float(series.fidelity_top[-1]),
            "defect_final": float(1.0 - series.fidelity_top[-1]),
            "fitted_decay_slopes": slopes,
            "top_subspace_dim": int(np.count_nonzero(series.top_mask)),
        }
        cols = [grid] + [series.weights[:, i] for i in range(dec.dim)]
        cols += [series.fidelity_top, 1.0 - series.fidelity_top]
        names = (
            ["time"]
            + [f"weight_{i}" for i in range(dec.dim)]
            + ["fidelity_top", "defect"]
        )
        tables["survival.csv"] = _csv_table(names, cols)

    return ResultBundle(summary=_plain(summary), tables=tables)


def _trajectory_table(traj: cl.Trajectory, spec: cl.ComplexHamiltonianSpec, stride: int) -> str:
    idx = np.arange(0, traj.qs.shape[0], stride)
    if idx[-1] != traj.qs.shape[0] - 1:
        idx = np.append(idx, traj.qs.shape[0] - 1)
    t = idx * traj.dt
    imvals = np.array([spec.im_h(traj.qs[k], traj.ps[k]) for k in idx])
    n = spec.n_modes
    names = (
        ["time"]
        + [f"q_{i}" for i in range(n)]
        + [f"p_{i}" for i in range(n)]
        + ["energy", "im_h"]
    )
    cols = (
        [t]
        + [traj.qs[idx, i] for i in range(n)]
        + [traj.ps[idx, i] for i in range(n)]
        + [traj.energy[idx], imvals]
    )
    return _csv_table(names, cols)


def _classical_bundle(s: Scenario, focus: str) -> ResultBundle:
    c = s.classical
    spec = classical_spec(s)
    n = spec.n_modes
    steps = cl._steps_for(c["horizon"], c["dt"])
    summary = {"kind": "classical", "n_modes": n, "horizon": c["horizon"], "dt": c["dt"]}
    tables = {}

    saddles = cl.saddle_points(spec)
    summary["critical_points"] = [
        {
            "q": list(cp.q),
            "index": cp.index,
            "hessian_eigenvalues": list(cp.hessian_eigenvalues),
        }
        for cp in saddles
    ]

    opt = None
    if focus in ("optimize", "full") and (s.search is not None or "initial" not in c):
        cfg = search_config(s, n)
        opt = cl.optimize_initial(spec, c["horizon"], c["dt"], cfg)
        summary["optimization"] = {
            "reward_star": float(opt.reward_star),
            "s0_star": {"q": list(opt.s0_star.q), "p": list(opt.s0_star.p)},
            "evals": int(opt.evals),
        }

    if "initial" in c:
        s0 = cl.PhaseState(np.array(c["initial"]["q"]), np.array(c["initial"]["p"]))
    elif opt is not None:
        s0 = opt.s0_star
    else:
        s0 = cl.PhaseState(np.zeros(n), np.zeros(n))
    traj = cl.integrate(spec, s0, c["dt"], steps, bound=c["bound"])
    rr = cl.reward(traj, spec)
    drift = float(
        np.max(np.abs(traj.energy - traj.energy[0]))
        / max(1.0, abs(float(traj.energy[0])))
    )
    summary["trajectory"] = {
        "initial": {"q": list(s0.q), "p": list(s0.p)},
        "reward": float(rr.reward),
        "dwell": {str(k): float(v) for k, v in sorted(rr.dwell.items())},
        "nearest_saddle_distance": float(rr.nearest_saddle_distance),
        "energy_initial": float(traj.energy[0]),
        "energy_drift_rel": drift,
    }
    tables["trajectory.csv"] = _trajectory_table(traj, spec, c["table_stride"])

    if "dwell" in c:
        dw = c["dwell"]
        res = cl.dwell_time(
            spec, dw["delta"], dw["big_delta"], dw["lyapunov"], dt=dw["dt"]
        )
        summary["dwell_time"] = {
            "measured": float(res.measured),
            "predicted": float(res.predicted),
            "ratio": float(res.ratio),
        }
    return ResultBundle(summary=_plain(summary), tables=tables)


def _inflaton_bundle(s: Scenario) -> ResultBundle:
    i = s.inflaton
    cfg = search_config(s, i["n_modes"]) if s.search is not None else None
    rep = cl.inflaton_toy(
        i["n_modes"],
        i["mode_curvature"],
        i["horizon"],
        i["dt"],
        search=cfg,
        delta=i["delta"],
        exit_radius=i["exit_radius"],
        bump_sigma=i["bump_sigma"],
        bump_weight=i["bump_weight"],
    )
    spec = cl.double_well_spec(
        bumps=[cl.hilltop_bump(i["n_modes"], i["bump_sigma"], i["bump_weight"])],
        curvature=i["mode_curvature"],
        n_modes=i["n_modes"],
    )
    steps = cl._steps_for(i["horizon"], i["dt"])
    traj = cl.integrate(spec, rep.s0_star, i["dt"], steps)
    summary = {
        "kind": "inflaton",
        "n_modes": i["n_modes"],
        "mode_curvature": i["mode_curvature"],
        "per_mode_dwell": list(rep.per_mode_dwell),
        "predicted_mode_dwell": float(rep.predicted_mode_dwell),
        "dwell_ratio": [
            float(t / rep.predicted_mode_dwell) for t in rep.per_mode_dwell
        ],
        "total_reward": float(rep.total_reward),
        "efolding_analog": float(rep.efolding_analog),
        "s0_star": {"q": list(rep.s0_star.q), "p": list(rep.s0_star.p)},
        "evals": int(rep.evals),
    }
    tables = {"trajectory.csv": _trajectory_table(traj, spec, i["table_stride"])}
    return ResultBundle(summary=_plain(summary), tables=tables)


def run_scenario(s: Scenario, focus: str = "full") -> ResultBundle:
    """Execute a scenario and return its deterministic result bundle.

    ``focus`` narrows a quantum run to one stage: "qmetric" (spectral
    decomposition and metric certificate only), "maximize", or
    "emerge"; "full" runs everything the scenario kind supports.
    Classical runs accept "optimize" or "full".
    """
    if s.kind == "quantum":
        if focus not in ("full", "qmetric", "maximize", "emerge"):
            raise ValueError(f"unsupported focus {focus!r} for a quantum scenario")
        return _quantum_bundle(s, focus)
    if s.kind == "classical":
        if focus not in ("full", "optimize"):
            raise ValueError(f"unsupported focus {focus!r} for a classical scenario")
        return _classical_bundle(s, focus)
    if focus != "full":
        raise ValueError(f"unsupported focus {focus!r} for an inflaton scenario")
    return _inflaton_bundle(s)


def replace_seed(s: Scenario, seed: int) -> Scenario:
    """Rebuild the scenario with an overriding seed (CLI --seed)."""
    return parse_scenario(serialize_scenario(s), seed_override=seed)


__all__ = [
    "Scenario",
    "ResultBundle",
    "parse_scenario",
    "serialize_scenario",
    "run_scenario",
    "replace_seed",
    "hamiltonian_matrix",
    "classical_spec",
    "search_config",
]
