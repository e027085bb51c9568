"""Command-line front end: scenario presets, sweeps, deterministic output.

Subcommands
-----------
sweep        criterion S (and gains, thresholds, diagnostics) over a seed grid
gain-map     per-mode gain and quadrature variances over a seeding-phase grid
theta-scan   per theta_1, the (theta_2, theta_3) pair minimizing S
beta-opt     golden-section minimum of S over the free weight parameter beta
oracle-check engine-vs-reference comparisons (exact squeezer, Fock, classical)
list-presets print the four scenario presets and the bipartite blue variant

Output is CSV (schema line ``# triphoton-csv v1`` then a column header) or
JSON carrying the same columns.  Floats are rendered with 17 significant
digits so files round-trip to full double precision, and repeated runs of the
same configuration are byte-identical; the run manifest (resolved config,
engine version, commutator-table checksum, timestamp) goes to a separate
``<out>.manifest.json`` so the data files stay deterministic.

Exit codes: 0 ok, 2 configuration error, 3 engine error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import re
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .criteria import (
    CombinationWeights,
    compute_S,
    gain_and_variances,
    optimize_beta,
    scan_thetas,
    thresholds,
)
from .evolution import (
    EvolutionParams,
    evolve_mode,
    omega_table_checksum,
    truncation_diagnostic,
)
from .oracles import (
    ClassicalField,
    SPDCOracleParams,
    classical_gain,
    fock_oracle_expectations,
    spdc_crossing_nin,
    spdc_exact_S,
)
from .states import SeedState, moment_cache, quadrature_moment_set

SCHEMA_LINE = "# triphoton-csv v1"
NIN_HARD_CAP = 1e12

_SQRT2 = math.sqrt(2.0)


class ConfigError(ValueError):
    """Bad flag value or inconsistent configuration (exit code 2)."""


# --------------------------------------------------------------------------
# scenario presets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    name: str
    phi: float
    thetas: tuple
    weights: tuple  # (h, g)
    beta: float = None

    def seed(self, n_in, phi):
        if self.name == "fluorescence":
            return SeedState.vacuum()
        if self.name == "single-seed":
            return SeedState.single_seed(3, n_in, phi)
        if self.name == "double-seed":
            return SeedState.double_seed(n_in, phi)
        return SeedState.full_seed(n_in, phi)


PRESETS = {
    "fluorescence": Preset(
        name="fluorescence", phi=0.0, thetas=(0.0, 0.0, 0.0),
        weights=((1.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
    ),
    # seed phases put the squeezed pair on u = Q1+Q2 / v = P1-P2 (single) and
    # on the one-against-two combinations with all LO phases zero (double)
    "single-seed": Preset(
        name="single-seed", phi=-math.pi / 2, thetas=(0.0, 0.0, 0.0),
        weights=((1.0, 1.0, 0.0), (1.0, -1.0, 0.0)),
    ),
    "double-seed": Preset(
        name="double-seed", phi=-math.pi / 2, thetas=(0.0, 0.0, 0.0),
        weights=((1.0, 1 / _SQRT2, 1 / _SQRT2), (1.0, -1 / _SQRT2, -1 / _SQRT2)),
    ),
    "full-seed": Preset(
        name="full-seed", phi=math.pi / 2, thetas=(0.0, math.pi, math.pi),
        weights=None, beta=_SQRT2,
    ),
}

PRESET_LINES = [
    "fluorescence: weights h=g=(1,1,1) default, theta=[0,0,0], vacuum seed",
    "single-seed: u=Q1+Q2, v=P1-P2, theta=[0,0,0], phi=-pi/2, seed mode 3",
    "double-seed: h1 = g1 = 1, h2=h3=1/sqrt(2), g2=g3=-1/sqrt(2), "
    "theta=[0,0,0], phi=-pi/2",
    "full-seed: beta=1.41421356, theta=[0,pi,pi], phi=pi/2",
    "blue-variant: u=Q1+Q2, v=P1-P2 on full seed "
    "(full-seed --weights 1,1,0,1,-1,0)",
]


# --------------------------------------------------------------------------
# flag parsing helpers
# --------------------------------------------------------------------------

_PI_RE = re.compile(r"^([+-]?\d*\.?\d*)pi(?:/([\d.]+))?$")


def parse_real(token) -> float:
    """Real number, allowing pi expressions like 2pi, -pi/2, 0.5pi."""
    tok = str(token).strip().lower().replace(" ", "")
    m = _PI_RE.match(tok)
    if m:
        coeff_s, den_s = m.groups()
        coeff = {"": 1.0, "+": 1.0, "-": -1.0}.get(coeff_s)
        if coeff is None:
            coeff = float(coeff_s)
        value = coeff * math.pi
        if den_s:
            value /= float(den_s)
        return value
    try:
        return float(tok)
    except ValueError:
        raise ConfigError(f"cannot parse number {token!r}") from None


def parse_grid(spec) -> np.ndarray:
    """Inclusive grid `start:stop:count`, log-spaced with a `log:` prefix."""
    s = str(spec).strip()
    log = s.startswith("log:")
    if log:
        s = s[4:]
    parts = s.split(":")
    if len(parts) == 1:
        return np.array([parse_real(parts[0])])
    if len(parts) != 3:
        raise ConfigError(f"grid {spec!r} is not start:stop:count")
    start, stop = parse_real(parts[0]), parse_real(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"grid count {parts[2]!r} is not an integer") from None
    if count < 1:
        raise ConfigError("grid needs at least one point")
    if count == 1:
        return np.array([start])
    if log:
        if start <= 0 or stop <= 0:
            raise ConfigError("log grid endpoints must be positive")
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


def parse_weights(spec):
    parts = [parse_real(p) for p in str(spec).split(",")]
    if len(parts) != 6:
        raise ConfigError("--weights needs h1,h2,h3,g1,g2,g3")
    return tuple(parts[:3]), tuple(parts[3:])


# --------------------------------------------------------------------------
# resolved run configuration
# --------------------------------------------------------------------------

@dataclass
class RunConfig:
    scenario: str
    xi: float = 1.75e-6
    order: int = 5
    nin_values: tuple = ()
    phi: float = None
    thetas: tuple = None
    beta: float = None
    weights: tuple = None  # (h, g) or None for preset
    out: str = None
    fmt: str = "csv"
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in PRESETS:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; pick from "
                f"{sorted(PRESETS)}"
            )
        preset = PRESETS[self.scenario]
        if self.phi is None:
            self.phi = preset.phi
        if self.thetas is None:
            self.thetas = preset.thetas
        if self.beta is None:
            self.beta = preset.beta
        if self.weights is None:
            if preset.weights is not None:
                self.weights = preset.weights
            else:
                w = CombinationWeights.from_beta(self.beta, self.thetas)
                self.weights = (w.h, w.g)
        if not self.nin_values:
            self.nin_values = (0.0,) if self.scenario == "fluorescence" \
                else tuple(np.geomspace(1e8, 1e11, 40))
        for n in self.nin_values:
            if n < 0:
                raise ConfigError("seed photon number must be >= 0")
            if n > NIN_HARD_CAP:
                raise ConfigError(
                    f"seed photon number {n:.3g} exceeds the validity cap "
                    f"{NIN_HARD_CAP:.0e}"
                )
        if self.order < 0:
            raise ConfigError("order must be >= 0")
        if self.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("--format must be csv or json")

    @property
    def combination(self) -> CombinationWeights:
        h, g = self.weights
        return CombinationWeights(h=h, g=g, thetas=self.thetas, beta=self.beta)

    def seed(self, n_in) -> SeedState:
        return PRESETS[self.scenario].seed(n_in, self.phi)

    def params(self) -> EvolutionParams:
        return EvolutionParams(xi=self.xi, order=self.order)

    def as_manifest_dict(self):
        h, g = self.weights
        return {
            "scenario": self.scenario,
            "xi": self.xi,
            "order": self.order,
            "nin_values": [float(x) for x in self.nin_values],
            "phi": self.phi,
            "thetas": list(self.thetas),
            "beta": self.beta,
            "h": list(h),
            "g": list(g),
            "format": self.fmt,
            "jobs": self.jobs,
            "extra": {k: (list(v) if isinstance(v, (tuple, np.ndarray)) else v)
                      for k, v in self.extra.items()},
        }


# --------------------------------------------------------------------------
# table emission
# --------------------------------------------------------------------------

def _fmt_value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def emit(columns, rows, config: RunConfig):
    """Write rows as CSV or JSON plus a reproducibility manifest."""
    if config.fmt == "csv":
        lines = [SCHEMA_LINE, ",".join(columns)]
        lines.extend(",".join(_fmt_value(v) for v in row) for row in rows)
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(
            {
                "schema": SCHEMA_LINE.lstrip("# "),
                "columns": list(columns),
                "rows": [[v if isinstance(v, str) else float(v) for v in row]
                         for row in rows],
            },
            sort_keys=True, indent=1,
        ) + "\n"
    if config.out is None:
        sys.stdout.write(payload)
        return
    with open(config.out, "w") as fh:
        fh.write(payload)
    manifest = {
        "engine_version": __version__,
        "omega_table_checksum": omega_table_checksum(config.order),
        "config": config.as_manifest_dict(),
        "created_at": _now_iso(),
    }
    with open(config.out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _now_iso():
    import datetime

    return datetime.datetime.now(datetime.timezone.utc).isoformat()


# --------------------------------------------------------------------------
# subcommand drivers
# --------------------------------------------------------------------------

SWEEP_COLUMNS = (
    "scenario", "order", "xi", "n_in", "phi", "beta",
    "theta1", "theta2", "theta3",
    "S", "var_u", "var_v", "f_p", "f_s", "verdict",
    "g1", "g2", "g3", "truncation_diagnostic",
)


def _gain_triplet(cache, seed):
    out = []
    for k in range(3):
        n_in = seed.n_in[k]
        out.append(cache.n_out[k] / n_in if n_in > 0 else math.nan)
    return out


def _sweep_row(config: RunConfig, n_in):
    params = config.params()
    seed = config.seed(n_in)
    w = config.combination
    report = compute_S(w, seed, params)
    cache = moment_cache(params, seed)
    gains = _gain_triplet(cache, seed)
    diag = max(truncation_diagnostic(k, seed, params) for k in (1, 2, 3))
    beta = config.beta if config.beta is not None else math.nan
    return (
        config.scenario, config.order, config.xi, n_in, config.phi, beta,
        w.thetas[0], w.thetas[1], w.thetas[2],
        report.S, report.var_u, report.var_v, report.f_p, report.f_s,
        report.verdict, gains[0], gains[1], gains[2], diag,
    )


def _check_row_identity(row):
    s, var_u, var_v = row[9], row[10], row[11]
    if abs(s - (var_u + var_v)) > 1e-10 * max(1.0, abs(s)):
        raise ArithmeticError("row violates S = var_u + var_v")
    return row


def _map_rows(config, worker, items):
    """Evaluate grid points, possibly concurrently, preserving order."""
    for k in (1, 2, 3):  # shared tables built before any fan-out
        evolve_mode(k, config.params())
        if config.order >= 1:
            evolve_mode(k, EvolutionParams(xi=config.xi,
                                           order=config.order - 1))
    if config.jobs == 1:
        return [worker(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(config.jobs) as pool:
        return list(pool.map(worker, items))


def cmd_sweep(config: RunConfig):
    rows = _map_rows(config, lambda n: _sweep_row(config, n),
                     config.nin_values)
    rows = [_check_row_identity(r) for r in rows]
    emit(SWEEP_COLUMNS, rows, config)
    return 0


GAINMAP_COLUMNS = (
    "scenario", "order", "xi", "n_in", "phi", "theta",
    "g1", "g2", "g3",
    "var_p1", "var_p2", "var_p3", "var_q1", "var_q2", "var_q3",
)


def cmd_gain_map(config: RunConfig):
    phi_grid = config.extra["phi_grid"]
    theta = config.extra.get("theta", 0.0)
    n_in = config.nin_values[0]
    params = config.params()

    def row(phi):
        seed = PRESETS[config.scenario].seed(n_in, phi)
        cache = moment_cache(params, seed)
        gains = _gain_triplet(cache, seed)
        var_p = [cache.quadrature_variance(k, theta, "P") for k in (1, 2, 3)]
        var_q = [cache.quadrature_variance(k, theta, "Q") for k in (1, 2, 3)]
        return (config.scenario, config.order, config.xi, n_in, phi, theta,
                *gains, *var_p, *var_q)

    rows = _map_rows(config, row, phi_grid)
    emit(GAINMAP_COLUMNS, rows, config)
    return 0


THETA_SCAN_COLUMNS = (
    "scenario", "order", "xi", "n_in", "phi",
    "theta1", "theta2", "theta3", "S",
)


def cmd_theta_scan(config: RunConfig):
    theta1_grid = config.extra["theta1_grid"]
    grid_points = config.extra.get("grid_points", 64)
    n_in = config.nin_values[0]
    params = config.params()
    seed = config.seed(n_in)
    w = config.combination
    for k in (1, 2, 3):
        evolve_mode(k, params)
    rows = [
        (config.scenario, config.order, config.xi, n_in, config.phi,
         t1, t2, t3, s)
        for t1, t2, t3, s in scan_thetas(seed, params, w, theta1_grid,
                                         grid_points=grid_points)
    ]
    emit(THETA_SCAN_COLUMNS, rows, config)
    return 0


BETA_OPT_COLUMNS = (
    "scenario", "order", "xi", "n_in", "phi",
    "theta1", "theta2", "theta3", "beta_star", "S_star",
)


def cmd_beta_opt(config: RunConfig):
    beta_range = config.extra.get("beta_range", (0.1, 10.0))
    params = config.params()

    def row(n_in):
        seed = config.seed(n_in)
        beta_star, s_star = optimize_beta(seed, params, config.thetas,
                                          beta_range)
        return (config.scenario, config.order, config.xi, n_in, config.phi,
                *config.thetas, beta_star, s_star)

    rows = _map_rows(config, row, config.nin_values)
    emit(BETA_OPT_COLUMNS, rows, config)
    return 0


ORACLE_COLUMNS = ("check", "engine", "oracle", "rel_error", "tolerance",
                  "status")


def cmd_oracle_check(config: RunConfig):
    """Engine-vs-oracle comparisons used by the acceptance suite."""
    rows = []

    def add(check, engine, oracle, tol):
        rel = abs(engine - oracle) / max(abs(oracle), 1e-30)
        rows.append((check, engine, oracle, rel, tol,
                     "ok" if rel <= tol else "FAIL"))

    params = config.params()
    # exact two-mode squeezer vs single-seed engine runs
    preset = PRESETS["single-seed"]
    w = CombinationWeights(*preset.weights, thetas=preset.thetas)
    for n_in in (1e8, 1e9, 1e10):
        seed = preset.seed(n_in, preset.phi)
        rep = compute_S(w, seed, params)
        oracle = spdc_exact_S(SPDCOracleParams.from_seed(config.xi, n_in))
        add(f"single_seed_S_nin_{n_in:.0e}", rep.S, oracle, 0.02)
    seed = preset.seed(1e11, preset.phi)
    rep = compute_S(w, seed, params)
    oracle = spdc_exact_S(SPDCOracleParams.from_seed(config.xi, 1e11))
    add("single_seed_S_nin_1e+11", rep.S, oracle, 0.10)

    # truncated-Fock moments at a strongly coupled, small-seed point
    fm = fock_oracle_expectations((0.3, 0.3j, -0.3), 0.01, cutoff=12)
    p_fock = EvolutionParams(xi=0.01, order=5)
    sd = SeedState((0.3, 0.3j, -0.3))
    cache = moment_cache(p_fock, sd)
    add("fock_n_mode1", cache.n_out[0], fm.n_mode[0], 1e-4)
    _, cov = quadrature_moment_set(p_fock, sd)
    add("fock_var_p1", cov[0, 0], fm.cov[0, 0], 1e-4)
    add("fock_cov_p1q2", cov[0, 4], fm.cov[0, 4], 1e-4)

    # classical mean-field gain at the largest seed (high order: the
    # comparison tests quantum-vs-classical, not series truncation)
    p_hi = EvolutionParams(xi=config.xi, order=8)
    seed = SeedState.full_seed(1e11, math.pi / 2)
    g_q = moment_cache(p_hi, seed).n_out[0] / 1e11
    g_c = classical_gain(1e11, math.pi / 2, config.xi)[0]
    add("classical_gain_nin_1e+11", g_q, g_c, 0.05)

    emit(ORACLE_COLUMNS, rows, config)
    return 0 if all(r[-1] == "ok" for r in rows) else 3


def cmd_list_presets(_config=None):
    for line in PRESET_LINES:
        print(line)
    return 0


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--scenario", default="full-seed",
                   help="fluorescence | single-seed | double-seed | full-seed")
    p.add_argument("--xi", default="1.75e-6", help="interaction strength")
    p.add_argument("--order", type=int, default=5, help="expansion order")
    p.add_argument("--nin", default=None, help="single seed photon number")
    p.add_argument("--nin-grid", default=None,
                   help="seed grid start:stop:count (log: prefix for log)")
    p.add_argument("--phi", default=None, help="seed phase (radians, pi ok)")
    p.add_argument("--beta", default=None, help="weight parameter beta")
    p.add_argument("--theta1", default=None)
    p.add_argument("--theta2", default=None)
    p.add_argument("--theta3", default=None)
    p.add_argument("--weights", default=None, help="h1,h2,h3,g1,g2,g3")
    p.add_argument("--out", default=None, help="output path")
    p.add_argument("--format", dest="fmt", default="csv",
                   choices=("csv", "json"))
    p.add_argument("--jobs", type=int, default=1)


def _config_from(args, **extra) -> RunConfig:
    nin_values = ()
    if args.nin_grid is not None:
        nin_values = tuple(parse_grid(args.nin_grid))
    elif args.nin is not None:
        nin_values = (parse_real(args.nin),)
    thetas = None
    if any(t is not None for t in (args.theta1, args.theta2, args.theta3)):
        preset = PRESETS.get(args.scenario)
        base = list(preset.thetas if preset else (0.0, 0.0, 0.0))
        for i, t in enumerate((args.theta1, args.theta2, args.theta3)):
            if t is not None:
                base[i] = parse_real(t)
        thetas = tuple(base)
    return RunConfig(
        scenario=args.scenario,
        xi=parse_real(args.xi),
        order=args.order,
        nin_values=nin_values,
        phi=parse_real(args.phi) if args.phi is not None else None,
        thetas=thetas,
        beta=parse_real(args.beta) if args.beta is not None else None,
        weights=parse_weights(args.weights) if args.weights else None,
        out=args.out,
        fmt=args.fmt,
        jobs=args.jobs,
        extra=extra,
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="triphoton",
        description="Triple-photon-generation entanglement engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="criterion S over a seed-strength grid")
    _add_common(p)

    p = sub.add_parser("gain-map", help="gain and variances vs seeding phase")
    _add_common(p)
    p.add_argument("--phi-grid", default="0:2pi:360")
    p.add_argument("--theta", default="0",
                   help="LO phase for the variance columns")

    p = sub.add_parser("theta-scan", help="minimize S over (theta2, theta3)")
    _add_common(p)
    p.add_argument("--theta1-grid", default="0:2pi:16")
    p.add_argument("--grid-points", type=int, default=64)

    p = sub.add_parser("beta-opt", help="minimize S over beta")
    _add_common(p)
    p.add_argument("--beta-range", default="0.1:10",
                   help="bracket lo:hi for the search")

    p = sub.add_parser("oracle-check", help="engine vs reference oracles")
    _add_common(p)

    sub.add_parser("list-presets", help="print scenario presets")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list-presets":
            return cmd_list_presets()
        if args.command == "gain-map":
            if args.nin is None and args.nin_grid is None:
                raise ConfigError("gain-map needs --nin > 0")
            config = _config_from(
                args,
                phi_grid=tuple(parse_grid(args.phi_grid)),
                theta=parse_real(args.theta),
            )
            if config.nin_values[0] <= 0:
                raise ConfigError("gain-map needs --nin > 0")
            return cmd_gain_map(config)
        if args.command == "theta-scan":
            if args.nin is None and args.nin_grid is None:
                raise ConfigError("theta-scan needs --nin")
            config = _config_from(
                args,
                theta1_grid=tuple(parse_grid(args.theta1_grid)),
                grid_points=args.grid_points,
            )
            return cmd_theta_scan(config)
        if args.command == "beta-opt":
            lo_hi = str(args.beta_range).split(":")
            if len(lo_hi) != 2:
                raise ConfigError("--beta-range must be lo:hi")
            config = _config_from(
                args,
                beta_range=(parse_real(lo_hi[0]), parse_real(lo_hi[1])),
            )
            if not config.nin_values:
                raise ConfigError("beta-opt needs --nin or --nin-grid")
            return cmd_beta_opt(config)
        if args.command == "oracle-check":
            return cmd_oracle_check(_config_from(args))
        if args.command == "sweep":
            return cmd_sweep(_config_from(args))
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, RuntimeError, OSError) as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
