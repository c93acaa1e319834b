"""Command-line front end: ``nlsdtn dtn|perturb|asym|constants|verify``.

A run is described by a JSON config (``--config``) plus ``--set key=value``
overrides; nested keys use dots, e.g. ``--set boundary.amplitude=0.5``.
Exit codes: 0 success, 1 verification failure, 2 input or solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from . import io as nio

COMMANDS = ("dtn", "perturb", "asym", "constants", "verify")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    lam: int = 1
    T: float = 8.0
    N: int = 400
    epsilon: float = 0.01
    boundary: dict = field(default_factory=lambda: {"kind": "sine"})
    tolerances: dict = field(default_factory=lambda: {"picard_tol": 1e-12, "max_iter": 50})
    output: str = "."
    n_max: int = 3
    t_min: float = 200.0
    t_max: float = 800.0
    samples: int = 601
    panel_order: int = 20
    constants_path: str = ""
    residuals: bool = True

    _BOUNDARY_KEYS = {
        "sine": {"kind", "amplitude", "frequency", "phase"},
        "zero": {"kind"},
        "table": {"kind", "path"},
        "series": {"kind", "orders"},
    }

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.lam not in (1, -1):
            raise ConfigError("lambda must be +1 or -1")
        if not self.T > 0:
            raise ConfigError("T must be positive")
        if int(self.N) != self.N or self.N < 4:
            raise ConfigError("N must be an integer >= 4")
        if not 1 <= self.n_max <= 4:
            raise ConfigError("n_max must be between 1 and 4")
        if not 0 < self.t_min < self.t_max:
            raise ConfigError("need 0 < t_min < t_max")
        kind = self.boundary.get("kind")
        if kind not in self._BOUNDARY_KEYS:
            raise ConfigError(f"boundary.kind must be one of {sorted(self._BOUNDARY_KEYS)}")
        extra = set(self.boundary) - self._BOUNDARY_KEYS[kind]
        if extra:
            raise ConfigError(f"unknown boundary keys for {kind!r}: {sorted(extra)}")
        if kind == "table" and not self.boundary.get("path"):
            raise ConfigError("table boundary needs a path")
        if kind == "series" and not self.boundary.get("orders"):
            raise ConfigError("series boundary needs a non-empty list of orders")
        extra = set(self.tolerances) - {"picard_tol", "max_iter"}
        if extra:
            raise ConfigError(f"unknown tolerance keys: {sorted(extra)}")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "boundary" in data:
            data["boundary"] = dict(data["boundary"])
        if "tolerances" in data:
            data["tolerances"] = {**{"picard_tol": 1e-12, "max_iter": 50}, **data["tolerances"]}
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d.pop("output")  # output location does not change the results
        return d


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_override(data: dict, item: str):
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value")
    key, value = item.split("=", 1)
    parts = key.split(".")
    node = data
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {key!r}")
    node[parts[-1]] = _parse_value(value)


# ---------------------------------------------------------------------------
# boundary data


def _series_orders(orders):
    import sympy as sp

    t = sp.Symbol("t")
    out = []
    for text in orders:
        try:
            expr = sp.sympify(text, locals={"t": t})
        except (sp.SympifyError, TypeError) as exc:
            raise ConfigError(f"cannot parse order {text!r}: {exc}")
        if expr.free_symbols - {t}:
            raise ConfigError(f"order {text!r} depends on symbols other than t")
        f = sp.lambdify(t, expr, "numpy")
        out.append(lambda x, f=f: np.asarray(f(np.asarray(x, dtype=float)), dtype=complex)
                   + 0j * np.asarray(x, dtype=float))
    return out


def boundary_from_config(cfg: RunConfig):
    from .glm import BoundaryData
    from .special import SampledFunction

    b = cfg.boundary
    kind = b["kind"]
    if kind == "zero":
        return BoundaryData.sine(0.0, lam=cfg.lam)
    if kind == "sine":
        return BoundaryData.sine(cfg.epsilon * float(b.get("amplitude", 1.0)),
                                 float(b.get("frequency", 1.0)), float(b.get("phase", 0.0)),
                                 lam=cfg.lam)
    if kind == "series":
        return BoundaryData.series(_series_orders(b["orders"]), cfg.epsilon, lam=cfg.lam)
    rows = np.array(nio.read_table_csv(Path(b["path"])))
    data = SampledFunction(rows[:, 0], rows[:, 1] + 1j * rows[:, 2])
    if data.hi < cfg.T:
        raise ConfigError(f"table covers [0, {data.hi}] but T = {cfg.T}")
    return BoundaryData.table(data, lam=cfg.lam)


def _order_functions(cfg: RunConfig):
    b = cfg.boundary
    if b["kind"] == "sine":
        a, w, p = (float(b.get(k, d)) for k, d in
                   (("amplitude", 1.0), ("frequency", 1.0), ("phase", 0.0)))
        return [lambda t: a * np.sin(w * np.asarray(t, dtype=float) + p) + 0j]
    if b["kind"] == "zero":
        return [lambda t: 0j * np.asarray(t, dtype=float)]
    if b["kind"] == "series":
        return _series_orders(b["orders"])
    raise ConfigError("perturb needs sine, zero or series boundary data")


# ---------------------------------------------------------------------------
# commands


def cmd_dtn(cfg: RunConfig, out: Path, chash: str):
    from .glm import TriangularGrid, global_relation_residual, solve_dtn, solve_goursat

    g0 = boundary_from_config(cfg)
    grid = TriangularGrid(cfg.T, int(cfg.N))
    res = solve_dtn(g0, grid, picard_tol=cfg.tolerances["picard_tol"],
                    max_iter=int(cfg.tolerances["max_iter"]))
    t = grid.t
    nio.write_csv(out / "g1.csv", ["t", "re_g1", "im_g1"],
                  ((ti, g.real, g.imag) for ti, g in zip(t, res.g1_values)), chash)
    diag = {
        "picard_iterations": {"max": int(res.picard_iterations.max()),
                              "mean": float(res.picard_iterations[1:].mean()),
                              "per_step": res.picard_iterations.tolist()},
        "antidiagonal_drift": res.antidiagonal_drift,
        "grid": {"T": cfg.T, "N": int(cfg.N), "dt": grid.dt},
    }
    if cfg.residuals:
        f = solve_goursat(g0, res.g1, grid)
        r1, r2, r3 = global_relation_residual(f, g0)
        diag["residuals"] = {"r1": r1, "r2": r2, "r3": r3}
    nio.write_json(out / "diagnostics.json", diag, chash)
    return 0


def cmd_perturb(cfg: RunConfig, out: Path, chash: str):
    from .glm import TriangularGrid
    from .perturbative import expand

    grid = TriangularGrid(cfg.T, int(cfg.N))
    series = expand(_order_functions(cfg), cfg.n_max, grid, lam=cfg.lam)
    t = grid.t
    names = [f"g1_{n}" for n in range(1, cfg.n_max + 1)]
    rows = []
    for i, ti in enumerate(t):
        row = [ti]
        for n in range(1, cfg.n_max + 1):
            v = complex(series.g1[n][i])
            row += [v.real, v.imag]
        rows.append(row)
    nio.write_csv(out / "orders.csv", ["t"] + nio.complex_columns(names), rows, chash)

    b = cfg.boundary
    if b["kind"] == "sine" and float(b.get("frequency", 1.0)) == 1.0 \
            and float(b.get("phase", 0.0)) == 0.0:
        from .sine3 import t_terms

        a3 = float(b.get("amplitude", 1.0)) ** 3 * cfg.lam
        terms = t_terms(t)
        keys = [f"T{j}" for j in range(1, 8)]
        rows = []
        for i, ti in enumerate(t):
            row = [ti]
            for k in keys:
                v = a3 * complex(terms[k][i])
                row += [v.real, v.imag]
            rows.append(row)
        nio.write_csv(out / "tterms.csv", ["t"] + nio.complex_columns(keys), rows, chash)
    return 0


def _constants(cfg: RunConfig):
    from .asymptotics import ConstantsTable, extract_constants

    if cfg.constants_path:
        data = json.loads(Path(cfg.constants_path).read_text())
        return ConstantsTable.from_json(data)
    return extract_constants(cfg.t_max, cfg.t_min, cfg.panel_order)


def cmd_constants(cfg: RunConfig, out: Path, chash: str):
    table = _constants(cfg)
    nio.write_json(out / "constants.json", table.to_json(), chash)
    return 0


def cmd_asym(cfg: RunConfig, out: Path, chash: str):
    from .asymptotics import g11_asym, g11_sine, g13_asym

    table = _constants(cfg)
    t = np.linspace(cfg.t_min, cfg.t_max, int(cfg.samples))
    g11 = g11_sine(t)
    ga = g11_asym(t)
    g13 = g13_asym(t, table)
    defect = np.abs(g11_sine(t + 2 * np.pi) - g11)
    cols = ["t"] + nio.complex_columns(["g11", "g11_asym", "g13_asym"]) + ["abs_g11_defect"]
    rows = ([ti, a.real, a.imag, b.real, b.imag, c.real, c.imag, d]
            for ti, a, b, c, d in zip(t, g11, ga, g13, defect))
    nio.write_csv(out / "asym.csv", cols, rows, chash)
    return 0


def run_checks(cfg: RunConfig) -> list:
    """The invariant suite behind ``verify``: one dict per check."""
    from . import asymptotics as asy
    from . import oracle
    from .glm import TriangularGrid, global_relation_residual, solve_dtn, solve_goursat
    from .perturbative import expand
    from .special import abel, h_exact, h_hypergeometric

    checks = []

    def add(name, measured, tol, passed=None):
        ok = bool(measured <= tol) if passed is None else bool(passed)
        checks.append({"name": name, "measured": float(measured), "tolerance": float(tol),
                       "passed": ok})

    t = np.linspace(0.0, 30.0, 121)
    add("abel_of_h_is_pi_sin", np.max(np.abs(abel(h_exact, t) - np.pi * np.sin(t))), 1e-6)

    ts = np.linspace(0.0, 10.0, 11)
    hf = h_exact(ts)
    hq = np.array([oracle.abel_reference(np.cos, x) for x in ts])
    hh = np.array([h_hypergeometric(x) for x in ts])
    add("h_representations", max(np.max(np.abs(hf - hq)), np.max(np.abs(hf - hh))), 1e-8)

    M = lambda a, b: np.exp(1j * (a + b))
    Ms = lambda a, b: 1j * np.exp(1j * (a + b))
    l1, r1 = asy.shift_check_I1(M, np.sin, 1.3, 0.4)
    l2, r2, c2 = asy.shift_check_I2(M, np.sin, 1.3, 0.4)
    l3, r3, c3 = asy.shift_check_I3(Ms, 1.3, 0.4)
    add("shift_identities", max(abs(l1 - r1), abs(l2 - r2 - c2), abs(l3 - r3 - c3)), 1e-10)

    sec = asy.secular_coefficients()
    add("secular_cancellation", float(sum(abs(complex(v)) for v in sec.values())), 0.0)

    g0 = boundary_from_config(cfg)
    grid = TriangularGrid(min(cfg.T, 8.0), min(int(cfg.N), 200))
    res = solve_dtn(g0, grid, picard_tol=cfg.tolerances["picard_tol"],
                    max_iter=int(cfg.tolerances["max_iter"]))
    add("antidiagonal_drift", res.antidiagonal_drift, 1e-8)
    scale = float(np.max(np.abs(g0(grid.t))))
    f = solve_goursat(g0, res.g1, grid)
    add("global_relation", max(global_relation_residual(f, g0)), 2.0 * grid.dt**2 * scale)

    if cfg.boundary["kind"] in ("sine", "zero"):
        ser = expand(_order_functions(cfg), 2, grid, lam=cfg.lam)
        add("second_order_vanishes", np.max(np.abs(ser.g1[2])), 1e-12)
    return checks


def cmd_verify(cfg: RunConfig, out: Path, chash: str):
    checks = run_checks(cfg)
    ok = all(c["passed"] for c in checks)
    nio.write_json(out / "report.json", {"passed": ok, "checks": checks}, chash)
    return 0 if ok else 1


_DISPATCH = {"dtn": cmd_dtn, "perturb": cmd_perturb, "asym": cmd_asym,
             "constants": cmd_constants, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlsdtn", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nlsdtn {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override a config entry (repeatable)")
    p.add_argument("-o", "--output", type=Path, help="output directory")
    return p


def load_config(args) -> RunConfig:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    for item in args.overrides:
        _apply_override(data, item)
    if data.get("command", args.command) != args.command:
        raise ConfigError(f"config is for {data['command']!r}, not {args.command!r}")
    data["command"] = args.command
    if args.output is not None:
        data["output"] = str(args.output)
    try:
        return RunConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc))


def main(argv=None) -> int:
    from .glm import SolverError

    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        chash = nio.config_hash(cfg.to_dict())
        t0 = time.perf_counter()
        code = _DISPATCH[cfg.command](cfg, out, chash)
    except SolverError as exc:
        print(f"nlsdtn: solver failed: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"nlsdtn: {exc}", file=sys.stderr)
        return 2
    status = "ok" if code == 0 else "verification failed"
    print(f"nlsdtn {cfg.command}: {status} ({time.perf_counter() - t0:.1f} s) -> {out}",
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
