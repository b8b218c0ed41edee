"""Command-line front end: ``rig-lab {theory,simulate,degree,clustering,assort,sweep}``.

Settings come from built-in defaults, then an INI file (``--config``),
then flags. The fully resolved settings are embedded in every output, and
``--config`` also accepts a previous ``report.json`` to rerun it exactly.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .model.core import ModelParams, Tau, item_window
from .model.graph import BACKENDS, check_windows, generate_bipartite, write_edge_list
from .model.sequences import WeightSequence
from .stats.experiments import mc_assortativity, mc_clustering, mc_degree_distribution
from .stats.gof import total_variation
from .stats.report import ExperimentReport
from .theory.asymptotics import assortativity_constants, asymptotic_triangle, weight_moments
from .theory.constants import limit_constants
from .theory.laws import degree_limit_pmf
from .theory.oracles import exact_pair_prob, exact_path2_pmf, exact_triple_probs
from .weights import InfiniteMomentError, parse_distribution, sample

log = logging.getLogger("rig_lab")

SUBCOMMANDS = ("theory", "simulate", "degree", "clustering", "assort", "sweep")
FORMATS = ("json", "csv")
DEFAULT_SEED = 20240607


class ConfigError(ValueError):
    """Invalid or inconsistent settings."""


@dataclass
class ExperimentConfig:
    command: str = "theory"
    # model
    a: float = 1.0
    b: float = 4.0
    tau: str = "linear"
    nu: float = 2.0
    # weights
    x: str = "constant(1)"
    y: str = "constant(1)"
    # targets
    t: int = 360
    s: int = 300
    u: int = 450
    n_rep: int = 10_000
    r_max: int = 40
    regime: str = "auto"
    exact: bool = True
    # simulate
    t_max: int = 2000
    backend: str = "envelope-skip"
    # assort
    accepted_target: int = 20_000
    raw_per_draw: int = 1000
    # sweep
    experiment: str = "degree"
    scales: str = "250,500,1000,2000"
    # run control
    seed: int = DEFAULT_SEED
    budget_seconds: float = 0.0
    format: str = "json,csv"

    def params(self) -> ModelParams:
        tau = Tau(self.tau, self.nu) if self.tau == "power" else Tau(self.tau)
        return ModelParams(self.a, self.b, tau)

    def formats(self) -> list:
        return [f.strip() for f in self.format.split(",") if f.strip()]

    def scale_list(self) -> list:
        return [float(v) for v in self.scales.split(",") if v.strip()]

    def budget(self):
        return self.budget_seconds if self.budget_seconds > 0 else None

    def as_dict(self) -> dict:
        return asdict(self)


# INI sections and the keys each may hold; any other key is an error
SECTIONS = {
    "model": ("a", "b", "tau", "nu"),
    "weights": ("x", "y"),
    "run": ("seed", "budget_seconds", "format", "n_rep"),
    "theory": ("t", "s", "u", "r_max"),
    "simulate": ("t_max", "backend"),
    "degree": ("t", "n_rep", "r_max", "regime", "exact"),
    "clustering": ("s", "t", "u", "n_rep"),
    "assort": ("s", "t", "n_rep", "accepted_target", "raw_per_draw"),
    "sweep": ("experiment", "scales", "t", "s", "u", "n_rep", "r_max", "accepted_target"),
}
_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, value):
    kind = _FIELD_TYPES[key]
    try:
        if kind in ("bool", bool):
            if isinstance(value, bool):
                return value
            v = str(value).strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if kind in ("int", int):
            f = float(value)
            if f != int(f):
                raise ValueError(value)
            return int(f)
        if kind in ("float", float):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot read {value!r} as {kind}") from None


def read_config_file(path, command: str) -> dict:
    """Settings from an INI file or from the ``config`` block of a report.json."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        cfg = data.get("config", data)
        unknown = set(cfg) - set(_FIELD_TYPES)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if cfg.get("command", command) != command:
            raise ConfigError(f"config was written by '{cfg['command']}', not '{command}'")
        return {k: _coerce(k, v) for k, v in cfg.items()}
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(path.read_text())
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from None
    out = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(SECTIONS)}")
        for key, value in parser.items(section):
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            # subcommand sections only apply to their own subcommand
            if section in SUBCOMMANDS and section != command:
                continue
            out[key] = _coerce(key, value)
    return out


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check every constraint, naming the violated inequality."""
    if cfg.command not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {cfg.command!r}")
    if not cfg.a > 0:
        raise ConfigError(f"requires a > 0, got a={cfg.a}")
    if not cfg.a < cfg.b:
        raise ConfigError(f"requires a < b, got a={cfg.a}, b={cfg.b}")
    if cfg.tau == "power" and not cfg.nu > 1:
        raise ConfigError(f"power tau requires nu > 1, got nu={cfg.nu}")
    try:
        params = cfg.params()
        parse_distribution(cfg.x)
        parse_distribution(cfg.y)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    bad = set(cfg.formats()) - set(FORMATS)
    if bad or not cfg.formats():
        raise ConfigError(f"format must be a comma list drawn from {FORMATS}, got {cfg.format!r}")
    if cfg.seed < 0:
        raise ConfigError("requires seed >= 0")
    if cfg.budget_seconds < 0:
        raise ConfigError("requires budget_seconds >= 0")
    if cfg.n_rep < 1:
        raise ConfigError(f"requires n_rep >= 1, got {cfg.n_rep}")
    if cfg.r_max < 0:
        raise ConfigError("requires r_max >= 0")
    if cfg.regime not in ("auto", "linear", "power", "general"):
        raise ConfigError(f"regime must be auto, linear, power or general, got {cfg.regime!r}")
    if cfg.backend not in BACKENDS:
        raise ConfigError(f"backend must be one of {BACKENDS}")
    if cfg.t_max < 1:
        raise ConfigError("requires t_max >= 1")
    if cfg.t < 1:
        raise ConfigError(f"requires t >= 1, got t={cfg.t}")
    if cfg.accepted_target < 1 or cfg.raw_per_draw < 1:
        raise ConfigError("requires accepted_target >= 1 and raw_per_draw >= 1")
    if cfg.command == "clustering" or (cfg.command == "sweep" and cfg.experiment == "clustering"):
        _check_triple(params, cfg.s, cfg.t, cfg.u)
    if cfg.command == "assort" or (cfg.command == "sweep" and cfg.experiment == "assort"):
        _check_pair(params, cfg.s, cfg.t)
    if cfg.command == "sweep":
        if cfg.experiment not in ("degree", "clustering", "assort"):
            raise ConfigError(f"sweep experiment must be degree, clustering or assort, got {cfg.experiment!r}")
        try:
            scales = cfg.scale_list()
        except ValueError:
            raise ConfigError(f"scales must be a comma list of numbers, got {cfg.scales!r}") from None
        if not scales or min(scales) <= 0:
            raise ConfigError("requires positive scales")
    return cfg


def _check_triple(params, s, t, u):
    if not 0 < s < t < u:
        raise ConfigError(f"requires 0 < s < t < u, got s={s}, t={t}, u={u}")
    lo_u = item_window(params, u)[0]
    hi_s = item_window(params, s)[1]
    if lo_u > hi_s:
        raise ConfigError(f"window condition ceil(a*u) <= floor(b*s) violated: {lo_u} > {hi_s}")


def _check_pair(params, s, t):
    if not 0 < s < t:
        raise ConfigError(f"requires 0 < s < t, got s={s}, t={t}")
    lo_t = item_window(params, t)[0]
    hi_s = item_window(params, s)[1]
    if lo_t > hi_s:
        raise ConfigError(f"lifetimes must overlap: ceil(a*t) <= floor(b*s) violated: {lo_t} > {hi_s}")


def resolve_config(command: str, config_path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Defaults, then the file, then flag overrides; validated."""
    values = {"command": command}
    if config_path:
        values.update(read_config_file(config_path, command))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = _coerce(k, v)
    values["command"] = command
    return validate(ExperimentConfig(**values))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _weights(cfg):
    """Realized constant weights when the laws are point masses, else the laws."""
    out = []
    for text in (cfg.x, cfg.y):
        d = parse_distribution(text)
        out.append(d.c if d.kind == "constant" else d)
    return out


def _regime(cfg):
    return None if cfg.regime == "auto" else cfg.regime


def run_theory(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    params = cfg.params()
    xd, yd = parse_distribution(cfg.x), parse_distribution(cfg.y)
    rep = ExperimentReport("theory", cfg.as_dict(), cfg.seed, 0)
    consts = limit_constants(params)
    rep.theory["limit_constants"] = {**consts.as_dict(), "source": "closed-form limit constants"}
    for k in ("gamma1", "gamma2", "gamma_tilde", "gamma", "gamma_star"):
        v = getattr(consts, k)
        if v is not None:
            rep.add(k, "", v, (v, v), v)
    try:
        law = degree_limit_pmf(params, xd, yd, regime=_regime(cfg), r_max=cfg.r_max)
        rep.theory["degree_limit"] = {**law.as_dict(), "source": f"{law.regime} degree limit law"}
        for r, p in enumerate(law.pmf.probs):
            rep.add("degree_limit_pmf", r, p, (p, p), p)
    except (InfiniteMomentError, ValueError) as e:
        rep.diagnostics.append(f"degree limit skipped: {e}")
    if params.tau.kind == "linear":
        try:
            mom = weight_moments(xd, yd, x_orders=(2, 3, 4), y_orders=(1, 2, 3))
            ac = assortativity_constants(mom, params.a, params.b)
            rep.theory["assortativity"] = {**ac.as_dict(), "source": "limit of conditional degree moments"}
            if ac.r_st is not None:
                rep.add("r_st", "", ac.r_st, (ac.r_st, ac.r_st), ac.r_st)
            else:
                rep.diagnostics.append(ac.diagnostic)
        except InfiniteMomentError as e:
            rep.diagnostics.append(f"assortativity constants skipped: {e}")
        try:
            _check_triple(params, cfg.s, cfg.t, cfg.u)
            mom = weight_moments(xd, yd, x_orders=(2, 3), y_orders=(1, 2))
            tri = asymptotic_triangle(params, mom, cfg.s, cfg.t, cfg.u)
            rep.theory["triangle"] = {**tri.as_dict(), "s": cfg.s, "t": cfg.t, "u": cfg.u,
                                      "source": "leading-order triangle asymptotics"}
        except (ConfigError, InfiniteMomentError, ValueError) as e:
            rep.diagnostics.append(f"triangle asymptotics skipped: {e}")
    return rep


def _expected_edges(params, x: WeightSequence, y: WeightSequence, t_max: int):
    """Sum of p and of p(1-p) over every potential edge of actors 1..t_max."""
    mean = var = 0.0
    for j in range(1, t_max + 1):
        lo, hi = item_window(params, j)
        if lo > hi:
            continue
        i = np.arange(lo, hi + 1)
        p = np.minimum(1.0, np.asarray(x[i], dtype=float) * float(y[j]) / np.sqrt(i * float(j)))
        mean += float(p.sum())
        var += float((p * (1 - p)).sum())
    return mean, var


def run_simulate(cfg: ExperimentConfig, threads: int, out_dir: Path, created: list) -> ExperimentReport:
    params = cfg.params()
    root = np.random.SeedSequence(cfg.seed)
    w_seq, g_seq = root.spawn(2)
    w_rng = np.random.default_rng(w_seq)
    horizon = int(item_window(params, cfg.t_max)[1])
    xd, yd = parse_distribution(cfg.x), parse_distribution(cfg.y)
    x = (WeightSequence.constant(xd.c) if xd.kind == "constant"
         else WeightSequence.from_array(sample(xd, 1, max(1, horizon), w_rng)))
    y = (WeightSequence.constant(yd.c) if yd.kind == "constant"
         else WeightSequence.from_array(sample(yd, 1, cfg.t_max, w_rng)))
    g = generate_bipartite(params, x, y, cfg.t_max, np.random.default_rng(g_seq), backend=cfg.backend)
    path = out_dir / "edges.tsv"
    created.append(path)
    write_edge_list(g, path, seed=cfg.seed, backend=cfg.backend,
                    extra={"config": json.dumps(cfg.as_dict(), sort_keys=True)})
    log.info("wrote %d edges to %s", g.n_edges, path)
    rep = ExperimentReport("simulate", cfg.as_dict(), cfg.seed, 1)
    mean, var = _expected_edges(params, x, y, cfg.t_max)
    sd = math.sqrt(var)
    rep.add("n_edges", cfg.t_max, g.n_edges, (mean - 4 * sd, mean + 4 * sd), mean, 1)
    rep.extra["windows_ok"] = check_windows(g)
    rep.extra["edge_list"] = path.name
    rep.distances["edge_count_z"] = (g.n_edges - mean) / sd if sd > 0 else 0.0
    return rep


def run_degree(cfg, threads, t=None):
    x, y = _weights(cfg)
    return mc_degree_distribution(cfg.params(), x, y, t or cfg.t, cfg.n_rep, cfg.seed, r_max=cfg.r_max,
                                  regime=_regime(cfg), exact=cfg.exact, threads=threads,
                                  budget_seconds=cfg.budget(), config=cfg.as_dict())


def run_clustering(cfg, threads, triple=None):
    x, y = _weights(cfg)
    s, t, u = triple or (cfg.s, cfg.t, cfg.u)
    return mc_clustering(cfg.params(), x, y, s, t, u, cfg.n_rep, cfg.seed, threads=threads,
                         budget_seconds=cfg.budget(), config=cfg.as_dict())


def raw_replicates_for(cfg, s, t) -> int:
    """Raw replicates expected to give ``accepted_target`` adjacent pairs.

    With constant weights this uses the exact pair probability; otherwise
    it falls back to n_rep.
    """
    x, y = _weights(cfg)
    if isinstance(x, float) and isinstance(y, float):
        p = exact_pair_prob(cfg.params(), x, y, s, t)
        if p > 0:
            return max(1, math.ceil(cfg.accepted_target / p))
    return cfg.n_rep


def run_assort(cfg, threads, pair=None):
    x, y = _weights(cfg)
    s, t = pair or (cfg.s, cfg.t)
    n_raw = raw_replicates_for(cfg, s, t)
    rep = mc_assortativity(cfg.params(), x, y, s, t, n_raw, cfg.seed, raw_per_draw=cfg.raw_per_draw,
                           threads=threads, budget_seconds=cfg.budget(), config=cfg.as_dict())
    rep.extra["raw_replicates"] = n_raw
    return rep


def run_sweep(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    """Statistic against scale; the convergence table is the CSV output."""
    params = cfg.params()
    rep = ExperimentReport("sweep", cfg.as_dict(), cfg.seed, cfg.n_rep)
    rows = []
    scales = cfg.scale_list()
    if cfg.experiment == "degree":
        xd, yd = parse_distribution(cfg.x), parse_distribution(cfg.y)
        law = degree_limit_pmf(params, xd, yd, regime=_regime(cfg), r_max=cfg.r_max)
        x, y = _weights(cfg)
        if not (isinstance(x, float) and isinstance(y, float)):
            raise ConfigError("degree sweep needs constant weights for the exact two-path law")
        for sc in scales:
            t = int(sc)
            ex = exact_path2_pmf(params, x, y, t, cfg.r_max)
            tv = total_variation(ex.probs, law.pmf.probs, ex.tail, law.pmf.tail)
            rep.add("tv_exact_vs_limit", t, tv, (tv, tv), 0.0, 0)
            rows.append({"scale": t, "statistic": "tv_exact_vs_limit", "value": tv, "theory": 0.0})
            log.info("sweep t=%d: TV(exact, limit) = %.6g", t, tv)
    elif cfg.experiment == "clustering":
        xd, yd = parse_distribution(cfg.x), parse_distribution(cfg.y)
        mom = weight_moments(xd, yd, x_orders=(2, 3), y_orders=(1, 2))
        x, y = _weights(cfg)
        for m in scales:
            s, t, u = (int(round(m * v)) for v in (cfg.s, cfg.t, cfg.u))
            _check_triple(params, s, t, u)
            asym = asymptotic_triangle(params, mom, s, t, u)
            if isinstance(x, float) and isinstance(y, float):
                ex = exact_triple_probs(params, x, y, s, t, u)
                p_delta, alpha = ex.p_delta, ex.alpha_t_su
            else:
                r = mc_clustering(params, x, y, s, t, u, cfg.n_rep, cfg.seed, threads=threads)
                p_delta, alpha = r.get("p_delta", f"{s},{t},{u}").estimate, r.get("alpha_t_su", f"{s},{t},{u}").estimate
            key = f"{s},{t},{u}"
            for name, est, th in (("p_delta", p_delta, asym.p_delta), ("alpha_t_su", alpha, asym.alpha_t_su)):
                rel = abs(est - th) / th if est is not None and th else None
                rep.add(name, key, est, (None, None), th, 0)
                rep.add(f"{name}_relative_error", key, rel, (None, None), 0.0, 0)
                rows.append({"scale": m, "statistic": f"{name}_relative_error", "value": rel, "theory": 0.0})
    else:
        for m in scales:
            s, t = int(round(m * cfg.s)), int(round(m * cfg.t))
            _check_pair(params, s, t)
            r = run_assort(cfg, threads, (s, t))
            key = f"{s},{t}"
            try:
                e = r.get("r_st", key)
            except KeyError:
                rep.diagnostics.append(f"no r_st estimate at scale {m}")
                continue
            rep.add("r_st", key, e.estimate, (e.ci_lo, e.ci_hi), e.theory, e.n_rep)
            err = None if e.theory is None else abs(e.estimate - e.theory)
            rep.add("r_st_abs_error", key, err, (None, None), 0.0, e.n_rep)
            rows.append({"scale": m, "statistic": "r_st_abs_error", "value": err, "theory": 0.0})
            rep.truncated |= r.truncated
    rep.extra["convergence"] = rows
    return rep


RUNNERS = {"theory": run_theory, "degree": run_degree, "clustering": run_clustering,
           "assort": run_assort, "sweep": run_sweep}


def run_experiment(cfg: ExperimentConfig, out_dir, threads: int = 1) -> ExperimentReport:
    """Run one subcommand and write its files; on failure nothing is left behind."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created: list = []
    t0 = time.monotonic()
    try:
        log.info("running %s", cfg.command)
        if cfg.command == "simulate":
            rep = run_simulate(cfg, threads, out_dir, created)
        else:
            rep = RUNNERS[cfg.command](cfg, threads)
        rep.duration_seconds = time.monotonic() - t0
        if "json" in cfg.formats():
            path = out_dir / "report.json"
            created.append(path)
            path.write_text(rep.to_json())
        if "csv" in cfg.formats():
            path = out_dir / f"{cfg.command}.csv"
            created.append(path)
            path.write_text(rep.to_csv())
        log.info("%s finished in %.1f s%s", cfg.command, rep.duration_seconds,
                 " (truncated by the time budget)" if rep.truncated else "")
        return rep
    except BaseException:
        for p in created:
            Path(p).unlink(missing_ok=True)
        raise


def _threads(value) -> int:
    if value is None:
        value = os.environ.get("RIG_LAB_THREADS", "1")
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"threads must be an integer, got {value!r}") from None
    if n < 1:
        raise ConfigError("requires threads >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rig-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI file, or a report.json to rerun")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", help="worker threads (default: $RIG_LAB_THREADS or 1)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", help="comma list of json,csv")
        sp.add_argument("--budget-seconds", dest="budget_seconds", type=float)
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--tau", choices=("linear", "power", "t-log-t", "exp-log-squared", "exp"))
        sp.add_argument("--nu", type=float)
        sp.add_argument("--x", help="item weight law, e.g. 'pareto(alpha=3, xmin=1)'")
        sp.add_argument("--y", help="actor weight law")
        sp.add_argument("--t", type=int)
        sp.add_argument("--s", type=int)
        sp.add_argument("--u", type=int)
        sp.add_argument("--n-rep", dest="n_rep", type=int)
        sp.add_argument("--r-max", dest="r_max", type=int)
        sp.add_argument("--regime", choices=("auto", "linear", "power", "general"))
        sp.add_argument("--t-max", dest="t_max", type=int)
        sp.add_argument("--backend", choices=BACKENDS)
        sp.add_argument("--accepted-target", dest="accepted_target", type=int)
        sp.add_argument("--raw-per-draw", dest="raw_per_draw", type=int)
        sp.add_argument("--experiment", choices=("degree", "clustering", "assort"))
        sp.add_argument("--scales", help="comma list, e.g. 250,500,1000,2000")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


_RUN_FLAGS = ("config", "threads", "out", "verbose", "command")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    overrides = {k: v for k, v in vars(args).items() if k not in _RUN_FLAGS}
    try:
        threads = _threads(args.threads)
        cfg = resolve_config(args.command, args.config, overrides)
        rep = run_experiment(cfg, args.out, threads)
    except ConfigError as e:
        log.error("configuration error: %s", e)
        return 2
    except (ValueError, ArithmeticError, OSError) as e:
        log.error("%s failed: %s", args.command, e)
        return 1
    for d in rep.diagnostics:
        log.warning("%s", d)
    return 0


if __name__ == "__main__":
    sys.exit(main())
