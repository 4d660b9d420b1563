"""Command-line entry point.

Exit codes: 0 pass, 2 a checked property failed, 3 bad usage or config,
4 a resource cap was hit. Every command writes ``report.json`` and
``figure.svg`` into ``--out``; reports are byte-identical for identical
inputs.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import dirichlet as dr
from . import groups as gr
from . import hyp_core as hc
from . import lemmas as lm
from . import quilt as qm
from . import rays as ry
from . import svg
from ._kernels import BACKEND

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 2, 3, 4

log = logging.getLogger("hypquilt")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config


@dataclasses.dataclass
class RunConfig:
    K: list | None = dataclasses.field(default_factory=lambda: [0.0, 1.0, 3.0])
    cantor_stage: int | None = None
    annulus: bool = False
    a: float = math.log(2.0)
    depth: int | list = 3
    word_ball: int = 10
    theoremC: bool = False
    prune_radius: float | None = gr.DEFAULT_PRUNE
    cap: int = gr.DEFAULT_CAP
    epsilon: float = 0.1
    seed: int = 0
    trials: int | None = None
    tolerance: float = 1e-9
    t_max: float = 8.0
    step: float = 0.5
    scan_step: float = 0.25
    schedule: list | None = None
    rays: list = dataclasses.field(default_factory=lambda: ["sigma", "delta", "probe"])
    endpoints: list = dataclasses.field(default_factory=list)
    threads: int = 1

    def to_json(self):
        return dataclasses.asdict(self)


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    raw.pop("comment", None)
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if raw.get("cantor_stage") is not None or raw.get("annulus"):
        raw.setdefault("K", None)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**raw)
    try:
        _validate(cfg)
    except TypeError as e:
        raise ConfigError(f"malformed config value: {e}") from e
    return cfg


def _validate(cfg: RunConfig):
    def num(name, lo=None, strict=False):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{name} must be a finite number")
        if lo is not None and (v <= lo if strict else v < lo):
            raise ConfigError(f"{name} must be {'>' if strict else '>='} {lo}")

    num("a", 0.0, strict=True)
    num("epsilon", 0.0, strict=True)
    num("tolerance", 0.0, strict=True)
    num("t_max", 0.0, strict=True)
    num("step", 0.0, strict=True)
    num("scan_step", 0.0, strict=True)
    for name in ("word_ball", "seed", "cap", "threads"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int) or v < (1 if name == "threads" else 0):
            raise ConfigError(f"{name} must be a nonnegative integer")
    if cfg.trials is not None and (not isinstance(cfg.trials, int) or cfg.trials < 1):
        raise ConfigError("trials must be a positive integer")
    if cfg.prune_radius is not None:
        num("prune_radius", 0.0, strict=True)
    if sum([cfg.K is not None, cfg.cantor_stage is not None, bool(cfg.annulus)]) != 1:
        raise ConfigError("give exactly one of K, cantor_stage, annulus")
    if cfg.schedule is not None:
        if not cfg.schedule or any(not isinstance(x, int) or x < 1 for x in cfg.schedule):
            raise ConfigError("schedule must be a list of positive integers")
        if sorted(cfg.schedule) != cfg.schedule:
            raise ConfigError("schedule must be increasing")
    bad = [r for r in cfg.rays if r not in ("sigma", "delta", "probe")]
    if bad:
        raise ConfigError(f"unknown ray kinds {bad}; use sigma, delta, probe or endpoints")
    for x in cfg.endpoints:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ConfigError("endpoints must be finite numbers")


def build_spec(cfg: RunConfig, word_ball: int | None = None) -> qm.QuiltSpec:
    wb = cfg.word_ball if word_ball is None else word_ball
    if cfg.annulus:
        if cfg.theoremC:
            raise ConfigError("theoremC needs a compact set K")
        return qm.annulus_spec(cfg.a, wb)
    if cfg.cantor_stage is not None:
        K = qm.cantor_stage(int(cfg.cantor_stage))
    else:
        K = qm.CompactSetSpec.parse(cfg.K)
    return qm.build_quilt_spec(K, cfg.a, cfg.depth, wb, cfg.theoremC)


def build_group(cfg: RunConfig, spec: qm.QuiltSpec) -> gr.GroupApprox:
    return gr.assemble_group(spec, prune_radius=cfg.prune_radius, cap=cfg.cap)


# ---------------------------------------------------------------- output


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def emit(out: str, command: str, cfg: RunConfig, body: dict, figure: str) -> None:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    report = {"schema": SCHEMA, "command": command, "config": cfg.to_json(), **body}
    (d / "report.json").write_text(dumps(report))
    (d / "figure.svg").write_text(figure)


# ---------------------------------------------------------------- commands


def run_verify_lemmas(cfg: RunConfig):
    trials = cfg.trials or 10_000
    rep = lm.run_all(cfg.seed, trials, cfg.tolerance)
    series = []
    ts = [i / 200 for i in range(1, 200)]
    for k in (1.5, 2.0, 5.0):
        series.append((f"k={k}", ts, [lm.triangle_gap(k, t) for t in ts]))
    fig = svg.profile_figure(series, 1.0, math.log(5.0), "triangle gap f(k, t) against t")
    return {"batteries": rep, "passed": rep["passed"]}, fig


def run_build(cfg: RunConfig):
    spec = build_spec(cfg)
    group = build_group(cfg, spec)
    fid = gr.fidelity_checks(spec, group)
    body = {"spec": qm.spec_to_json(spec), "group": gr.group_to_json(group),
            "domain_sides": [s.label for s in group.domain or []],
            "fidelity": fid, "passed": fid["passed"]}
    title = f"fundamental domain, a={spec.a:.6g}"
    fig = svg.domain_figure(group, spec.a, title) if group.domain else \
        svg.profile_figure([], 1.0, 1.0, "no explicit domain")
    return body, fig


def _annulus_exact(ap: dr.DirichletApprox, a: float, tol: float = 1e-10) -> bool:
    ea = math.exp(a)
    ivs = sorted((iv.lo, iv.hi) for iv in ap.boundary_at_infinity)
    want = [(-ea, -1.0), (1.0, ea)]
    return len(ivs) == 2 and all(abs(x - y) < tol for p, q in zip(ivs, want) for x, y in zip(p, q))


def run_dirichlet(cfg: RunConfig):
    base = build_spec(cfg)
    L = cfg.word_ball
    sched = cfg.schedule or [x for x in (L - 4, L - 2, L) if x >= 1]
    approxes, reports = [], []
    ea = math.exp(base.a)
    for wb in sched:
        spec = dataclasses.replace(base, word_ball=wb)
        group = build_group(cfg, spec)
        ap = dr.boundary_at_infinity(spec.p_tilde, group.ball.mats, wb)
        ap.parabolics = dr.detect_parabolic_boundary(group.ball.mats, dr.IdealInterval(1.0, ea), ap)
        if spec.theoremC:
            ap.parabolics += dr.detect_parabolic_boundary(group.ball.mats,
                                                          dr.IdealInterval(-ea, -1.0), ap)
        approxes.append(ap)
        reports.append(dr.compare_to_prediction(ap, spec))
    nested = [dr.is_contained(approxes[i + 1], approxes[i]) for i in range(len(approxes) - 1)]
    ex = [r["excess_measure"] for r in reports]
    checks = {
        "monotone": all(nested),
        "c_star_contained": all(r["all_c_star_contained"] for r in reports),
        "excess_nonincreasing": all(b <= a + 1e-12 for a, b in zip(ex, ex[1:])),
    }
    if base.theoremC:
        checks["left_interval_absent"] = reports[-1]["left_interval_measure"] < 0.05
    else:
        checks["left_interval_full"] = all(r["left_interval_full"] for r in reports)
    if cfg.annulus:
        checks["annulus_exact"] = all(_annulus_exact(ap, base.a) for ap in approxes)
    body = {"schedule": sched, "nested": nested, "reports": reports,
            "approximations": [ap.to_json() for ap in approxes],
            "checks": checks, "passed": all(checks.values())}
    fig = svg.dirichlet_figure(approxes[-1], base.a, base.c_star,
                               title=f"boundary at infinity, L={sched[-1]}")
    return body, fig


def _c_values(spec: qm.QuiltSpec) -> list[float]:
    return sorted({round(s % spec.a, 14) for s in spec.c_positions})


def run_ray(cfg: RunConfig):
    spec = build_spec(cfg)
    if not spec.c_positions:
        raise ConfigError("ray profiles need a compact set K")
    group = build_group(cfg, spec)
    times = ry.sample_times(cfg.t_max, cfg.step)
    prof = lambda r: ry.delta_profile(r, times, group, workers=cfg.threads)
    out, checks, series = [], {}, []
    for c in _c_values(spec):
        entry = {"c": c}
        if "sigma" in cfg.rays:
            p = prof(ry.sigma_ray(c))
            cd = [d for d, ok in zip(p.delta_values, p.certified_flags) if ok]
            frac = len(cd) / len(times)
            entry["sigma"] = p.to_json()
            entry["sigma_certified_fraction"] = frac
            checks[f"sigma_critical({c:.6g})"] = bool(all(abs(d) < 1e-6 for d in cd) and frac >= 0.8)
            series.append((p.label, times, p.delta_values))
        if "delta" in cfg.rays:
            s, l = (prof(r) for r in ry.delta_c_rays(c, spec.a))
            entry["delta_short"], entry["delta_long"] = s.to_json(), l.to_json()
            checks[f"delta_one_critical({c:.6g})"] = "critical-consistent" in (s.verdict, l.verdict)
            series += [(s.label, times, s.delta_values), (l.label, times, l.delta_values)]
        out.append(entry)
    extra = []
    if "probe" in cfg.rays:
        p = prof(ry.probe_ray(spec, group))
        extra.append({"kind": "probe", "endpoint": p.label, **p.to_json()})
        checks["probe_not_critical"] = p.verdict != "critical-consistent"
        series.append((p.label, times, p.delta_values))
    for x in cfg.endpoints:
        p = prof(ry.RaySpec(spec.p_tilde, float(x), f"custom({x:.6g})"))
        extra.append({"kind": "custom", **p.to_json()})
        series.append((p.label, times, p.delta_values))
    body = {"rays": out, "other_rays": extra, "certified_radius": group.ball.certified_radius,
            "checks": checks, "passed": all(checks.values())}
    fig = svg.profile_figure(series, cfg.t_max, title="Delta profiles")
    return body, fig


def run_sigma_scan(cfg: RunConfig):
    spec = build_spec(cfg)
    if not spec.c_positions:
        raise ConfigError("scans need a compact set K")
    group = build_group(cfg, spec)
    scans, checks, series = [], {}, []
    for c in _c_values(spec):
        for r in ry.delta_c_rays(c, spec.a):
            sc = ry.theorem_sigma_scan(r, cfg.epsilon, cfg.t_max, spec, group, cfg.scan_step)
            tr = sc.trace
            q = tr[-max(2, len(tr) // 4):]
            mono = all(b <= a + 1e-12 for a, b in zip(q, q[1:]))
            found = sc.t_epsilon is not None and sc.t_epsilon <= cfg.t_max
            scans.append({"c": c, "ray": r.label, "endpoint": r.endpoint, **sc.to_json(),
                          "tail_monotone": mono})
            checks[f"scan({r.label})"] = bool(found and mono)
            series.append((r.label, sc.times, tr))
    rng = np.random.default_rng(cfg.seed)
    bat = ry.verify_distance_lemmas(spec, group, cfg.trials or 1000, rng)
    checks["distance_lemmas"] = bat["passed"]
    body = {"scans": scans, "distance_lemmas": bat, "checks": checks,
            "passed": all(checks.values())}
    fig = svg.profile_figure(series, cfg.t_max, title=f"scaffold distance, epsilon={cfg.epsilon}")
    return body, fig


RUNNERS = {"verify-lemmas": run_verify_lemmas, "build": run_build, "dirichlet": run_dirichlet,
           "ray": run_ray, "sigma-scan": run_sigma_scan}


# ---------------------------------------------------------------- click wiring


def _common(f):
    opts = [
        click.option("--config", "config", type=click.Path(dir_okay=False), default=None,
                     help="JSON config file"),
        click.option("--a", "a", type=float, default=None, help="core geodesic length"),
        click.option("--depth", type=int, default=None, help="flute depth"),
        click.option("--word-ball", "word_ball", type=int, default=None, help="word length L"),
        click.option("--epsilon", type=float, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--trials", type=int, default=None),
        click.option("--theoremC/--no-theoremC", "theoremC", default=None),
        click.option("--out", "out", type=click.Path(file_okay=False), default="out"),
        click.option("--threads", type=int, default=None, help="worker cap"),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _run(command: str, config, out, **overrides) -> int:
    try:
        cfg = load_config(config, overrides)
        body, fig = RUNNERS[command](cfg)
    except (ConfigError, qm.QuiltConfigError, lm.LemmaDomainError, hc.DegenerateInputError,
            hc.HypDomainError) as e:
        click.echo(f"config error: {e}", err=True)
        return EXIT_CONFIG
    except (gr.BallCapError, ry.TileSearchError) as e:
        click.echo(f"resource cap: {e}", err=True)
        return EXIT_CAP
    except gr.GroupConstructionError as e:
        click.echo(f"group construction failed: {e}", err=True)
        return EXIT_FAIL
    emit(out, command, cfg, body, fig)
    status = "pass" if body["passed"] else "FAIL"
    click.echo(f"{command}: {status} ({Path(out) / 'report.json'}, backend={BACKEND})")
    return EXIT_OK if body["passed"] else EXIT_FAIL


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def cli(verbose):
    """Quilted flute surfaces: lemma checks, groups, Dirichlet boundaries, rays."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)


def _make(name: str, doc: str):
    @cli.command(name=name, help=doc)
    @_common
    def cmd(config, out, **kw):
        return _run(name, config, out, **kw)
    return cmd


_make("verify-lemmas", "Closed-form lemma batteries against metric oracles.")
_make("build", "Build the recipe and its group; check loop lengths and traces.")
_make("dirichlet", "Boundary at infinity of truncated Dirichlet domains over a ball schedule.")
_make("ray", "Delta profiles for sigma, delta and probe rays.")
_make("sigma-scan", "Scaffold-distance scans for delta rays plus the distance-lemma battery.")


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="hypquilt", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIG
    except click.exceptions.Abort:
        return EXIT_CONFIG
    code = rv if isinstance(rv, int) else EXIT_OK
    return code


if __name__ == "__main__":
    sys.exit(main())
