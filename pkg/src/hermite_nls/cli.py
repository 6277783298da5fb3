"""Command-line runner: one JSON config per run, CSV/JSON outputs and a run manifest.

    hermite-nls <command> --config <path> --out <dir> [--seed N] [--threads N]

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
configuration error.  HERMITE_NLS_THREADS overrides the thread count.
"""
import argparse
from dataclasses import asdict, dataclass, field
import datetime
import hashlib
import json
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__
from . import estimates_lab as est
from . import random_ensemble as ens
from .hermite_core import Basis, SpectralField, lp_norm, make_grid, random_field, synthesize
from .nls_picard import (
    PicardConfig, lipschitz_flow_check, mass_conservation_check, picard_solve, scattering_profile,
)
from .propagator_lens import free_propagate, lens_forward, nls_residual, nlsh_residual, propagate_harmonic
from .rng import stream

THREADS_ENV = "HERMITE_NLS_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class RunManifest:
    command: str
    config_digest: str
    seed: int
    version: str
    threads: int
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)


def digest(data):
    return hashlib.sha256(data).hexdigest()


def now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


# -- config schemas -------------------------------------------------------------------------
# key -> (accepted types, default)

NUM = (int, float)
SCHEMAS = {
    "estimates": {
        "ids": (list, ["propre1", "propre2", "propre3", "propre3_ground", "propre4", "rapidement",
                       "bilis", "bilis_equal"]),
        "l4_range": (list, [16, 1024]),
        "linf_ks": (list, [2 ** k for k in range(1, 10)]),
        "product_lams": (list, [8, 16, 32, 64]),
        "ground_lams": (list, [8, 11.3, 16, 22.6, 32, 45.3, 64]),
        "rapid_lams": (list, [4, 8, 16]),
        "bilis_N": (int, 4),
        "bilis_Ms": (list, [4, 8, 16, 32, 64]),
        "bilis_trials": (int, 50),
        "bilis_dim": (int, 3),
        "equal_Ns": (list, [2, 4, 8]),
        "equal_trials": (int, 50),
        "seed": (int, 0),
    },
    "mc-tail": {
        "basis": (dict, {"dim": 1, "n_max": 6}),
        "coefficients": (list, None),
        "coefficient_rule": (dict, {"rule": "harmonic"}),
        "law": (str, "gaussian"),
        "eps": (NUM, 1.0),
        "seed": (int, 0),
        "trials": (int, 10000),
        "thresholds": ((list, dict), {"quantiles": [0.05, 0.995], "count": 15}),
        "conditions": ((str, list, int), "all"),
        "norms": (dict, {"s": 0.6, "sigma": 0.0, "N_max": 8, "R": 8.0}),
    },
    "chaos": {
        "law": (str, "gaussian"),
        "orders": (list, [1, 2, 3]),
        "qs": (list, [2, 4, 6, 8, 10, 12, 14, 16]),
        "trials": (int, 100000),
        "side": (int, 4),
        "seed": (int, 0),
        "max_p": (int, 6),
        "bound_cases": (int, 200),
        "ratio_slack": (NUM, 0.05),
    },
    "picard": {
        "basis": (dict, {"dim": 3, "n_max": 6}),
        "u0": (dict, {"mode": [0, 0, 0], "amplitude": 0.05}),
        "K": (NUM, 1.0),
        "M_t": (int, 65),
        "tol": (NUM, 1e-13),
        "max_iter": (int, 20),
        "s": (NUM, 0.6),
        "perturbation": (NUM, 1e-4),
        "dump": (bool, False),
    },
    "lens-check": {
        "data_n_max": (int, 12),
        "grid_n_max": (int, 72),
        "seeds": (int, 20),
        "s_values": (list, [0.1, 0.25, 0.5, 1.0]),
        "tol": (NUM, 1e-5),
        "seed": (int, 0),
    },
    "selftest": {"seed": (int, 0)},
}


def load_config(command, path):
    """Parse and validate; returns (config dict, raw bytes used for the digest)."""
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    schema = SCHEMAS[command]
    if path is None:
        raw = b"{}"
        user = {}
    else:
        try:
            raw = Path(path).read_bytes()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        try:
            user = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            where = f"line {e.lineno}, column {e.colno}: " if isinstance(e, json.JSONDecodeError) else ""
            raise ConfigError(f"malformed config {path}: {where}{e}") from e
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
    cfg = {}
    for key, val in user.items():
        if key not in schema:
            raise ConfigError(f"field {key!r}: unknown for command {command!r}")
        types = schema[key][0]
        if isinstance(val, bool) and types is not bool:
            raise ConfigError(f"field {key!r}: expected {types}, got a boolean")
        if not isinstance(val, types):
            raise ConfigError(f"field {key!r}: expected {types}, got {type(val).__name__}")
        cfg[key] = val
    for key, (_, default) in schema.items():
        cfg.setdefault(key, default)
    return cfg, raw


def _basis(desc):
    try:
        return Basis(int(desc["dim"]), int(desc["n_max"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"field 'basis': needs integer dim and n_max ({e})") from e


# -- output helpers ---------------------------------------------------------------------------

class Outputs:
    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def write(self, name, text):
        p = self.dir / name
        p.write_text(text, encoding="utf-8")
        self.files.append(name)
        return p

    def json(self, name, obj):
        return self.write(name, json.dumps(_plain(obj), sort_keys=True, indent=1) + "\n")

    def csv(self, name, header, rows):
        lines = [",".join(header)]
        lines += [",".join(_cell(v) for v in row) for row in rows]
        return self.write(name, "\n".join(lines) + "\n")


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    return est.fmt(v)


def _plain(obj):
    """Convert numpy scalars/arrays and tuples to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    return obj


# -- commands ---------------------------------------------------------------------------------

ESTIMATE_HEADERS = {
    "propre1": ("n", "lambda", "l4_norm"),
    "propre2": ("k", "lambda", "linf_norm"),
    "propre3": ("lambda", "lambda_top", "product_l2"),
    "propre3_ground": ("k", "lambda", "product_l2"),
    "propre4": ("lambda", "lambda_top", "triple_l2"),
    "rapidement": ("n1", "lambda", "integral"),
    "bilis": ("N", "M", "bilinear_constant"),
    "bilis_equal": ("N", "M", "bilinear_constant"),
}


def _estimate(rid, cfg, seed):
    if rid == "propre1":
        lo, hi = cfg["l4_range"]
        return est.eigenfunction_lp_scan(4, range(int(lo), int(hi) + 1))
    if rid == "propre2":
        return est.eigenfunction_lp_scan(np.inf, cfg["linf_ks"], dim=3)
    if rid == "propre3":
        return est.product_envelope_scan(cfg["product_lams"], dim=3, order=2)
    if rid == "propre3_ground":
        return est.ground_partner_scan(cfg["ground_lams"])
    if rid == "propre4":
        return est.product_envelope_scan(cfg["product_lams"], dim=3, order=3)
    if rid == "rapidement":
        return est.rapid_decay_scan(tuple(cfg["rapid_lams"]))
    if rid == "bilis":
        return est.bilinear_scan(cfg["bilis_N"], cfg["bilis_Ms"], cfg["bilis_trials"], seed,
                                 dim=cfg["bilis_dim"])
    if rid == "bilis_equal":
        return est.bilinear_equal_scale(cfg["equal_Ns"], cfg["equal_trials"], seed)
    raise ConfigError(f"field 'ids': unknown estimate id {rid!r}")


def cmd_estimates(cfg, out, seed, threads, only=None):
    ids = [only] if only else cfg["ids"]
    for rid in ids:
        if rid not in ESTIMATE_HEADERS:
            raise ConfigError(f"field 'ids': unknown estimate id {rid!r}")
    summary, ok = {}, True
    for rid in ids:
        rep = _estimate(rid, cfg, seed)
        out.csv(f"estimates_{rid}.csv", ESTIMATE_HEADERS[rid], rep.rows)
        summary[rid] = rep.summary()
        ok &= rep.passed
    out.json("estimates_summary.json", {"estimates": summary, "pass": ok})
    return ok


def _coefficients(cfg, basis):
    if cfg["coefficients"] is not None:
        c = np.array(cfg["coefficients"], dtype=float)
        if c.shape != (basis.size, 2):
            raise ConfigError(f"field 'coefficients': expected {basis.size} [re, im] pairs")
        return c[:, 0] + 1j * c[:, 1]
    rule = cfg["coefficient_rule"]
    kind = rule.get("rule")
    if kind == "harmonic":              # c_n = 1 / (1 + position)
        return 1.0 / (1.0 + np.arange(basis.size))
    if kind == "power":                 # c_n = lambda_n^(-alpha)
        return basis.lam2 ** (-float(rule.get("alpha", 1.0)) / 2)
    if kind == "single":
        f = SpectralField.mode(basis, tuple(rule.get("mode", [0] * basis.dim)), rule.get("amplitude", 1.0))
        return f.coeffs
    raise ConfigError(f"field 'coefficient_rule': unknown rule {kind!r}")


def cmd_mc_tail(cfg, out, seed, threads):
    basis = _basis(cfg["basis"])
    if cfg["law"] not in ens.LAWS:
        raise ConfigError(f"field 'law': expected one of {ens.LAWS}")
    if cfg["trials"] < 1000:
        raise ConfigError("field 'trials': at least 1000 required")
    norms = cfg["norms"]
    try:
        ecfg = ens.EventConfig(**norms)
        conds = ens._selector(cfg["conditions"])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"field 'norms'/'conditions': {e}") from e
    model = ens.RandomCoefficientModel(SpectralField(basis, _coefficients(cfg, basis)), cfg["law"],
                                       cfg["eps"], seed)
    ev = ens.EventEvaluator(basis, ecfg)
    crit, conds = ens.critical_samples(model, cfg["trials"], conds, evaluator=ev, threads=threads)
    th = cfg["thresholds"]
    if isinstance(th, dict):
        worst = crit.max(axis=1)
        qa, qb = th.get("quantiles", [0.05, 0.995])
        ts = np.linspace(np.quantile(worst, qa), np.quantile(worst, qb), int(th.get("count", 15)))
    else:
        ts = np.array(th, dtype=float)
    est_list = ens.tail_estimates(crit, ts)
    slope, intercept, r2, k = ens.fit_log_tail(est_list)
    out.csv("mc_tail.csv", ("t", "trials", "hits", "p", "lo", "hi"),
            [(e.t, e.trials, e.hits, e.p, e.lo, e.hi) for e in est_list])
    per = [(c, float(t), int(np.count_nonzero(crit[:, j] > t))) for j, c in enumerate(conds) for t in ts]
    out.csv("mc_tail_conditions.csv", ("condition", "t", "hits"), per)
    ok = bool(np.isfinite(slope) and slope < 0 and r2 >= 0.95)
    out.json("mc_tail_summary.json", {"fit": {"slope": slope, "intercept": intercept, "r2": r2, "points": k},
                                      "conditions": list(conds), "trials": cfg["trials"], "pass": ok})
    return ok


def chaos_checks(cfg, seed):
    rows, report, ok = [], {}, True
    rng = stream(seed, 7)
    for order in cfg["orders"]:
        c = rng.standard_normal((cfg["side"],) * order)
        r = ens.chaos_moment_mc(order, c, cfg["law"], cfg["qs"], cfg["trials"], seed=seed)
        ratios = r.ratios
        bounded = r.bounded(cfg["ratio_slack"])
        second = abs(r.second_moment - r.exact_second) <= 3 * r.second_moment_se
        ok &= bounded and second
        report[f"order{order}"] = {**r.summary(), "ratio_bounded": bounded, "second_moment_ok": second}
        rows += [(order, q, m, ratio) for q, m, ratio in zip(r.qs, r.moments, ratios)]
    counts = {}
    for p in range(cfg["max_p"] + 1):
        n = len(ens.enumerate_pairings(p))
        counts[p] = n
        ok &= n == int(np.prod(np.arange(2 * p - 1, 0, -2))) if p else n == 1
    iff = True
    for m in range(1, 7):
        for k in range(1, 4):
            for idx in np.ndindex(*(k,) * m):
                iff &= (ens.bernoulli_moment_exact(idx, k) != 0) == (ens.compatible_pairing(idx) is not None)
    violations = 0
    for _ in range(cfg["bound_cases"]):
        p = int(rng.integers(1, 5))
        side = int(rng.integers(1, 7))
        pairs = ens.enumerate_pairings(p)
        s = pairs[int(rng.integers(len(pairs)))]
        cs = [rng.standard_normal((side, side)) for _ in range(p)]
        violations += not ens.pairing_sum_bound_check(cs, s)[2]
    g = stream(seed, 8).standard_normal((2, 100_000))
    pz = ens.paley_zygmund_check((g[0] ** 2 + g[1] ** 2) / 2, 0.5)
    ok &= iff and violations == 0 and pz[2]
    report.update({"pairing_counts": counts, "bernoulli_iff_pairing": iff,
                   "bound_violations": violations, "paley_zygmund": list(pz)})
    return ok, rows, report


def cmd_chaos(cfg, out, seed, threads):
    if cfg["law"] not in ens.LAWS:
        raise ConfigError(f"field 'law': expected one of {ens.LAWS}")
    ok, rows, report = chaos_checks(cfg, seed)
    out.csv("chaos_moments.csv", ("order", "q", "moment", "ratio"), rows)
    out.json("chaos_summary.json", {**report, "pass": ok})
    return ok


def _u0(desc, basis, seed):
    if "file" in desc:
        try:
            f = SpectralField.from_json(Path(desc["file"]).read_text())
        except (OSError, ValueError, KeyError) as e:
            raise ConfigError(f"field 'u0.file': {e}") from e
        if f.basis != basis:
            raise ConfigError("field 'u0.file': basis differs from 'basis'")
        return f
    if "ensemble" in desc:
        e = desc["ensemble"]
        base = SpectralField(basis, np.ones(basis.size) * float(e.get("scale", 1.0)))
        model = ens.RandomCoefficientModel(base, e.get("law", "gaussian"), e.get("eps", 1.0), seed)
        return ens.sample(model, int(e.get("trial", 0)))
    if "mode" in desc:
        try:
            return SpectralField.mode(basis, tuple(desc["mode"]), float(desc.get("amplitude", 1.0)))
        except (ValueError, KeyError) as e:
            raise ConfigError(f"field 'u0.mode': {e}") from e
    raise ConfigError("field 'u0': needs one of 'mode', 'file', 'ensemble'")


def cmd_picard(cfg, out, seed, threads):
    basis = _basis(cfg["basis"])
    try:
        pc = PicardConfig(K=cfg["K"], M_t=cfg["M_t"], tol=cfg["tol"], max_iter=cfg["max_iter"],
                          s=cfg["s"], threads=threads)
    except ValueError as e:
        raise ConfigError(f"picard parameters: {e}") from e
    u0 = _u0(cfg["u0"], basis, seed)
    r = picard_solve(u0, pc)
    summary = {"picard": r.summary()}
    ok = r.converged
    if r.converged:
        mass = mass_conservation_check(r, u0)
        sc = scattering_profile(r, u0)
        pert = float(cfg["perturbation"])
        bump = SpectralField.mode(basis, tuple([0] * basis.dim), 1.0)
        r1, _ = lipschitz_flow_check(u0, u0 + bump * pert, pc)
        r2, _ = lipschitz_flow_check(u0, u0 + bump * (pert / 2), pc)
        stable = abs(r2 / r1 - 1) <= 0.2 if r1 > 0 else True
        checks = {"mass_ok": mass <= 1e-8, "ratio_ok": bool(r.ratios) and r.ratios[-1] <= 0.5,
                  "scattering_decreasing": sc.decreasing,
                  "scattering_tail_ok": sc.distances[-1] <= 1e-3 * sc.norm if sc.norm > 0 else True,
                  "lipschitz_stable": stable}
        ok = all(checks.values())
        summary.update({"mass_deviation": mass, "scattering": sc.summary(),
                        "lipschitz": {"ratio": r1, "ratio_half": r2}, "checks": checks})
        out.csv("picard_scattering.csv", ("t", "distance"), list(zip(sc.times, sc.distances)))
        if cfg["dump"]:
            v = r.v_coeffs()
            out.csv("picard_v.csv", ("node", "t", "index", "re", "im"),
                    [(j, r.times[j], i, v[j, i].real, v[j, i].imag)
                     for j in range(v.shape[0]) for i in range(v.shape[1])])
    out.csv("picard_iterations.csv", ("iteration", "increment"),
            [(k + 1, x) for k, x in enumerate(r.increments)])
    out.json("picard_summary.json", {**summary, "pass": bool(ok)})
    return bool(ok)


def lens_checks(cfg, seed):
    bd, g = Basis(1, cfg["data_n_max"]), make_grid(Basis(1, cfg["grid_n_max"]))
    rows, worst = [], 0.0
    for k in range(cfg["seeds"]):
        f = random_field(bd, stream(seed, 3, k))
        u0 = synthesize(f, g)
        for s in cfg["s_values"]:
            lens = lens_forward(lambda t: synthesize(propagate_harmonic(f, t), g), s, g, 1)
            err = lp_norm(lens.values - free_propagate(u0, s, g), 2, g)
            rows.append((k, s, err))
            worst = max(worst, err)
    b = Basis(1, 12)
    gb = make_grid(b)
    f = random_field(b, stream(seed, 4))
    f = f * (1 / f.norm())
    ts = 0.1 + 1e-3 * np.arange(9)
    u = np.array([synthesize(propagate_harmonic(f, t), gb) for t in ts])
    res_h = nlsh_residual(u, ts, 0, gb, b, nonlinear=False).residual_l2
    v = np.array([free_propagate(synthesize(f, g), t, g) for t in ts])
    res_f = nls_residual(v, ts, 0, g, nonlinear=False).residual_l2
    report = {"lens_vs_free_max": worst, "nlsh_linear_residual": res_h, "nls_free_residual": res_f}
    ok = worst <= cfg["tol"] and res_h <= 1e-6 and res_f <= 1e-6
    return ok, rows, report


def cmd_lens_check(cfg, out, seed, threads):
    ok, rows, report = lens_checks(cfg, seed)
    out.csv("lens_check.csv", ("seed", "s", "l2_error"), rows)
    out.json("lens_check_summary.json", {**report, "pass": bool(ok)})
    return bool(ok)


def selftest_checks(seed):
    """Quick module invariants; every entry is (name, passed, value)."""
    out = []
    b = Basis(2, 20)
    g = make_grid(b)
    f = random_field(b, stream(seed, 0))
    from .hermite_core import analyze
    rt = float(np.abs(analyze(synthesize(f, g), b, g).coeffs - f.coeffs).max())
    out.append(("round_trip_2d", rt <= 1e-10, rt))
    gl = float(np.abs(propagate_harmonic(propagate_harmonic(f, 0.3), 0.4).coeffs
                      - propagate_harmonic(f, 0.7).coeffs).max())
    out.append(("group_law", gl <= 1e-14, gl))
    lam2 = b.lam2
    tele = bool(np.all(sum(est.dyadic_multiplier(lam2, 2 ** j) for j in range(7))[lam2 <= 4 ** 6] == 1))
    out.append(("telescoping", tele, 1.0))
    h0 = est.product_l2((0, 0, 0), (0, 0, 0))
    out.append(("ground_product", abs(h0 - (2 * np.pi) ** -0.75) <= 1e-12, h0))
    counts = [len(ens.enumerate_pairings(p)) for p in range(5)]
    out.append(("pairing_counts", counts == [1, 1, 3, 15, 105], counts[-1]))
    r = ens.chaos_moment_mc(1, np.array([1.0]), "gaussian", [2], 20000, seed=seed)
    out.append(("chaos_second_moment", abs(r.second_moment - 1) <= 3 * r.second_moment_se, r.second_moment))
    u0 = SpectralField.mode(Basis(1, 10), 0, 0.2)
    pr = picard_solve(u0, PicardConfig(tol=1e-12))
    mass = mass_conservation_check(pr, u0) if pr.converged else np.inf
    out.append(("picard_small_data", pr.converged and mass <= 1e-8, mass))
    ok, _, rep = lens_checks({"data_n_max": 12, "grid_n_max": 72, "seeds": 2, "s_values": [0.5],
                              "tol": 1e-5}, seed)
    out.append(("lens_identity", ok, rep["lens_vs_free_max"]))
    return out


def cmd_selftest(cfg, out, seed, threads):
    checks = selftest_checks(seed)
    out.csv("selftest.csv", ("check", "pass", "value"), checks)
    ok = all(c[1] for c in checks)
    out.json("selftest_summary.json", {"checks": {n: {"pass": p, "value": v} for n, p, v in checks},
                                       "pass": ok})
    return ok


COMMANDS = {"estimates": cmd_estimates, "mc-tail": cmd_mc_tail, "chaos": cmd_chaos,
            "picard": cmd_picard, "lens-check": cmd_lens_check, "selftest": cmd_selftest}


def run(command, config_path, out_dir, seed=None, threads=None, estimate_id=None, stderr=None):
    """Run one command; returns the exit code."""
    stderr = stderr or sys.stderr
    try:
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}; expected one of {sorted(COMMANDS)}")
        cfg, raw = load_config(command, config_path)
        env = os.environ.get(THREADS_ENV)
        if env is not None:
            try:
                threads = int(env)
            except ValueError as e:
                raise ConfigError(f"{THREADS_ENV} must be an integer") from e
        threads = max(1, int(threads or 1))
        seed = int(cfg.get("seed", 0) if seed is None else seed)
        if estimate_id is not None and command != "estimates":
            raise ConfigError("--id only applies to the estimates command")
    except ConfigError as e:
        print(f"configuration error: {e}", file=stderr)
        return 2
    out = Outputs(out_dir)
    man = RunManifest(command, digest(raw), seed, __version__, threads, started=now())
    try:
        if command == "estimates":
            ok = cmd_estimates(cfg, out, seed, threads, estimate_id)
        else:
            ok = COMMANDS[command](cfg, out, seed, threads)
        code = 0 if ok else 1
    except ConfigError as e:
        print(f"configuration error: {e}", file=stderr)
        code = 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        # numerical guards surface as failed checks
        print(f"check failed: {type(e).__name__}: {e}", file=stderr)
        out.json(f"{command.replace('-', '_')}_error.json", {"error": str(e), "pass": False})
        code = 1
    man.finished = now()
    man.outputs = list(out.files)
    (out.dir / "manifest.json").write_text(json.dumps({**asdict(man), "exit_code": code}, sort_keys=True,
                                                      indent=1) + "\n", encoding="utf-8")
    return code


def main(argv=None):
    p = argparse.ArgumentParser(prog="hermite-nls", description=__doc__.splitlines()[0])
    p.add_argument("command", help=", ".join(sorted(COMMANDS)))
    p.add_argument("--config", default=None, help="JSON configuration file (defaults if omitted)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--id", dest="estimate_id", default=None, help="single estimate id (estimates only)")
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    return run(args.command, args.config, args.out, args.seed, args.threads, args.estimate_id)


if __name__ == "__main__":
    sys.exit(main())
