"""Command-line front end: simulations, condition checks, report emission.

Subcommands
    gumbel      replicate maxima, normalized coordinates, Gumbel report
    conditions  the three covariance conditions per n, as JSON or CSV
    covariance  dense rho_n tabulation with sigma_n^2 and c_n in the header
    selftest    the oracle suite at small n, PASS/FAIL table

A config file (flat key=value tokens, e.g. "alpha=0.5 n=1024,4096") seeds
the options; explicit flags override it.  Exit codes: 0 success, 2 for
validation problems (bad flags, bad config, alpha outside the theory),
1 for runtime failures.

Emitted files are deterministic functions of the run configuration:
numbers are written in shortest round-trip form, replicates are reduced
in replicate order, and nothing time- or host-dependent is included, so
reruns (with any --threads value) produce byte-identical files.  The
embedded provenance block therefore carries every result-affecting
option and deliberately omits the execution-only ones (threads, out).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import covar, extremes, maxfind, synth
from .coeffs import CoefficientModel, karamata_ratio, model_to_kv

_MODEL_KEYS = ("alpha", "family", "c0", "beta", "cut")
_FILE_KEYS = {
    "alpha": float, "family": str, "c0": float, "beta": float, "cut": float,
    "n": str, "reps": int, "seed": int, "oversample": int, "threads": int,
    "out": str, "format": str, "t_max": float, "eps_budget": float,
    "T": float, "eps": float, "margin": float, "step": float,
}
_DEFAULT_FORMAT = {"gumbel": "json", "conditions": "json", "covariance": "csv"}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: CoefficientModel | None
    n_list: tuple[int, ...]
    reps: int
    seed: int
    oversample: int
    threads: int
    out: str | None
    format: str
    t_max: float
    eps_budget: float
    T: float
    eps: float
    margin: float
    step: float
    inject_fault: bool = False

    def provenance(self) -> dict:
        """Result-affecting options embedded in every output file."""
        d: dict = {"subcommand": self.subcommand}
        if self.model is not None:
            d["model"] = model_to_kv(self.model)
        d["n"] = list(self.n_list)
        d["seed"] = self.seed
        if self.subcommand == "gumbel":
            d["reps"] = self.reps
            d["oversample"] = self.oversample
        if self.subcommand == "conditions":
            d.update(t_max=self.t_max, eps_budget=self.eps_budget,
                     T=self.T, eps=self.eps, margin=self.margin, step=self.step)
        if self.subcommand == "covariance":
            d["step"] = self.step
        d["format"] = self.format
        return d


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fnoise",
        description="Gumbel-limit toolkit for the maximum of Gaussian 1/f^alpha noise",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", help="flat key=value config file")
        sp.add_argument("--alpha", type=float, help="regular-variation index, < 1")
        sp.add_argument("--family", choices=("constant", "logpower"))
        sp.add_argument("--c0", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--cut", type=float)
        sp.add_argument("--n", help="degree, or comma list like 256,4096")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"))

    sp = sub.add_parser("gumbel", help="replicate maxima and Gumbel report")
    common(sp)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--oversample", type=int)

    sp = sub.add_parser("conditions", help="the three covariance conditions")
    common(sp)
    sp.add_argument("--t-max", type=float, dest="t_max")
    sp.add_argument("--eps-budget", type=float, dest="eps_budget")
    sp.add_argument("--T", type=float, dest="T")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--margin", type=float)
    sp.add_argument("--step", type=float)

    sp = sub.add_parser("covariance", help="tabulate rho_n")
    common(sp)
    sp.add_argument("--step", type=float)

    sp = sub.add_parser("selftest", help="oracle suite at small n")
    common(sp)
    sp.add_argument("--inject-fault", action="store_true", dest="inject_fault",
                    help="perturb one oracle input; the suite must fail")
    return parser


def _parse_config_file(path: str) -> dict:
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep or not key or not value:
                raise ValueError(f"malformed config token {token!r} (expected key=value)")
            if key not in _FILE_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            if key in values:
                raise ValueError(f"duplicate config key {key!r}")
            try:
                values[key] = _FILE_KEYS[key](value)
            except ValueError as exc:
                raise ValueError(f"bad value for config key {key!r}: {value!r}") from exc
    return values


def _parse_n_list(text: str) -> tuple[int, ...]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"malformed n list {text!r}")
        try:
            value = int(part)
        except ValueError as exc:
            raise ValueError(f"n entries must be integers, got {part!r}") from exc
        if value < 1:
            raise ValueError(f"n entries must be >= 1, got {value}")
        out.append(value)
    return tuple(out)


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_vals = _parse_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(key, default):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_vals:
            return file_vals[key]
        return default

    sub = args.subcommand
    default_n = "16" if sub == "selftest" else "4096"
    n_list = _parse_n_list(pick("n", default_n))

    alpha = pick("alpha", None)
    model = None
    if sub != "selftest" or alpha is not None:
        if alpha is None:
            raise ValueError("missing required option --alpha (or alpha= in config)")
        model = CoefficientModel(
            alpha=alpha,
            family=pick("family", "constant"),
            c0=pick("c0", 1.0),
            beta=pick("beta", 0.0),
            cut=pick("cut", None),
        )

    reps = int(pick("reps", 400))
    seed = int(pick("seed", 1))
    oversample = int(pick("oversample", 8))
    threads = int(pick("threads", 1))
    fmt = pick("format", _DEFAULT_FORMAT.get(sub, "json"))
    if sub == "gumbel":
        if reps < 100:
            raise ValueError(f"gumbel needs reps >= 100, got {reps}")
        for n in n_list:
            if n < 2:
                raise ValueError(f"gumbel needs n >= 2, got {n}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    if oversample < 4:
        raise ValueError(f"oversample must be >= 4, got {oversample}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    step = float(pick("step", 0.1))
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    margin = float(pick("margin", 1e-3))
    if not (0.0 < margin < 1.0):
        raise ValueError(f"margin must lie in (0, 1), got {margin}")
    return RunConfig(
        subcommand=sub,
        model=model,
        n_list=n_list,
        reps=reps,
        seed=seed,
        oversample=oversample,
        threads=threads,
        out=pick("out", None),
        format=fmt,
        t_max=float(pick("t_max", 0.02)),
        eps_budget=float(pick("eps_budget", 0.01)),
        T=float(pick("T", 20.0)),
        eps=float(pick("eps", 0.5)),
        margin=margin,
        step=step,
        inject_fault=bool(getattr(args, "inject_fault", False)),
    )


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _config_comment(cfg: RunConfig) -> str:
    prov = cfg.provenance()
    parts = []
    for key, value in prov.items():
        if key == "n":
            value = ",".join(str(v) for v in value)
        parts.append(f"{key}={value}")
    return "# config: " + " ".join(parts) + "\n"


def cmd_gumbel(cfg: RunConfig) -> int:
    reports = [
        extremes.report(cfg.model, n, cfg.reps, cfg.seed,
                        oversample=cfg.oversample, workers=cfg.threads)
        for n in cfg.n_list
    ]
    if cfg.format == "json":
        payload = {"config": cfg.provenance(),
                   "reports": [r.to_dict() for r in reports]}
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
    else:
        buf = io.StringIO()
        buf.write(_config_comment(cfg))
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "record", "key", "value"])
        for rep in reports:
            for key in ("replicates", "ks_distance", "p_value",
                        "sample_mean", "sample_var"):
                writer.writerow([rep.n, "summary", key, repr(getattr(rep, key))])
            for p_, v in rep.quantiles.items():
                writer.writerow([rep.n, "quantile", repr(p_), repr(v)])
        _emit(cfg, buf.getvalue())
    return 0


def _condition_records(cfg: RunConfig) -> list[dict]:
    """One record per condition per n; a condition whose domain excludes
    this n (e.g. T > n/2 at n=1) yields an explicit error record instead
    of aborting the sweep."""
    records = []
    for n in cfg.n_list:
        checks = (
            (1, lambda n=n: covar.check_condition1(
                cfg.model, n, t_max=cfg.t_max, eps_budget=cfg.eps_budget)),
            (2, lambda n=n: covar.check_condition2(
                cfg.model, n, T=cfg.T, eps=cfg.eps, step=cfg.step)),
            (3, lambda n=n: covar.check_condition3(
                cfg.model, n, eps=cfg.eps, margin=cfg.margin, step=cfg.step)),
        )
        for cond, fn in checks:
            try:
                records.append(fn().to_dict())
            except ValueError as exc:
                records.append({
                    "condition": cond,
                    "n": int(n),
                    "alpha": cfg.model.alpha,
                    "family": cfg.model.family,
                    "sup_value": None,
                    "achieving_t": None,
                    "pass": False,
                    "error": str(exc),
                })
    return records


def cmd_conditions(cfg: RunConfig) -> int:
    records = _condition_records(cfg)
    if cfg.format == "json":
        payload = {"config": cfg.provenance(), "records": records}
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
    else:
        buf = io.StringIO()
        buf.write(_config_comment(cfg))
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["condition", "n", "alpha", "family", "sup_value",
                         "achieving_t", "pass", "threshold", "modification_bound"])
        for r in records:
            writer.writerow([
                r["condition"], r["n"], repr(r["alpha"]), r["family"],
                "" if r["sup_value"] is None else repr(r["sup_value"]),
                "" if r["achieving_t"] is None else repr(r["achieving_t"]),
                r["pass"],
                "" if "threshold" not in r else repr(r["threshold"]),
                "" if "modification_bound" not in r else repr(r["modification_bound"]),
            ])
        _emit(cfg, buf.getvalue())
    return 0


def cmd_covariance(cfg: RunConfig) -> int:
    profiles = [covar.profile(cfg.model, n, step=cfg.step) for n in cfg.n_list]
    if cfg.format == "json":
        payload = {"config": cfg.provenance(), "profiles": []}
        for prof in profiles:
            payload["profiles"].append({
                "n": prof.n,
                "sigma_sq": prof.sigma_sq,
                "c_n": prof.c_n,
                "t": prof.t.tolist(),
                "rho": prof.rho.tolist(),
            })
        _emit(cfg, json.dumps(payload, indent=2) + "\n")
    else:
        buf = io.StringIO()
        buf.write(_config_comment(cfg))
        for prof in profiles:
            buf.write(f"# n={prof.n} sigma_sq={prof.sigma_sq!r} c_n={prof.c_n!r}\n")
            buf.write("t,rho\n")
            for t, r in zip(prof.t.tolist(), prof.rho.tolist()):
                buf.write(f"{t!r},{r!r}\n")
        _emit(cfg, buf.getvalue())
    return 0


def _selftest_checks(n: int, inject_fault: bool):
    """The oracle suite: each yields (name, passed, detail)."""
    model = CoefficientModel(alpha=0.5)
    d = synth.draw(model, n, (321, 0))
    sigma = d.sigma()

    # Transform vs direct summation on a grid.
    grid = synth.eval_grid(d, covar._next_pow2(8 * n))
    times = grid.times()
    direct = np.array([synth.eval_at(d, t) for t in times])
    values = grid.values + (1e-3 * sigma if inject_fault else 0.0)
    err = float(np.max(np.abs(values - direct)))
    yield ("transform vs direct summation", err <= 1e-9 * sigma,
           f"max discrepancy {err:.3e}")

    # Dense-sampling oracle for the maximizer (independent of the FFT path).
    res = maxfind.global_max(d)
    ts = np.linspace(-math.pi, math.pi, 200_001)
    k = np.arange(1, n + 1, dtype=float)
    dense = np.sin(np.outer(ts, k)) @ (d.w * d.u) + np.cos(np.outer(ts, k)) @ (d.w * d.v)
    gap = res.value - float(np.max(dense))
    yield ("dense-oracle maximum", 0.0 <= gap <= 1e-6 * sigma,
           f"refined - dense = {gap:.3e}")

    # Finite differences vs deriv_at.
    t0 = 0.731
    h = 1e-6
    fd1 = (synth.eval_at(d, t0 + h) - synth.eval_at(d, t0 - h)) / (2 * h)
    g1 = synth.deriv_at(d, t0, 1)
    scale = max(1.0, n * n * sigma)
    yield ("finite-difference derivative", abs(fd1 - g1) <= 1e-4 * scale * h + 1e-9,
           f"|fd - analytic| = {abs(fd1 - g1):.3e}")

    # Analytic n=1 maximum.
    d1 = synth.NoiseDraw(n=1, u=np.array([0.6]), v=np.array([-0.8]),
                         w=np.array([1.0]), model=model, seed_path=(0, 0))
    r1 = maxfind.global_max(d1)
    exact = math.hypot(0.6, -0.8)
    yield ("closed-form n=1 maximum", abs(r1.value - exact) <= 1e-10,
           f"|value - 1| = {abs(r1.value - exact):.3e}")

    # KS distance of exact stratified Gumbel quantiles.
    m = 1000
    zs = [extremes.gumbel_quantile((i - 0.5) / m) for i in range(1, m + 1)]
    dks, _ = extremes.ks_test(zs)
    yield ("stratified-quantile KS distance", dks <= 0.5 / m + 1e-12,
           f"D = {dks:.3e}")

    # Karamata quotient, exactly summable case.
    ratio = karamata_ratio(CoefficientModel(alpha=0.0), 10_000, 0)
    yield ("Karamata quotient alpha=0", abs(ratio - 1.0) <= 1e-12,
           f"|ratio - 1| = {abs(ratio - 1.0):.3e}")


def cmd_selftest(cfg: RunConfig) -> int:
    n = cfg.n_list[0]
    failures = 0
    lines = []
    for name, ok, detail in _selftest_checks(n, cfg.inject_fault):
        status = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        lines.append(f"{name:<38} {status}  ({detail})")
    total = len(lines)
    lines.append(f"selftest: {total - failures}/{total} passed")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if failures == 0 else 1


_DISPATCH = {
    "gumbel": cmd_gumbel,
    "conditions": cmd_conditions,
    "covariance": cmd_covariance,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _DISPATCH[cfg.subcommand](cfg)
    except maxfind.RefinementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
