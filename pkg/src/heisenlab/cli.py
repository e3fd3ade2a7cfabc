"""``heisenlab`` command line: run checks, print a report, exit 0/1/2.

Exit status is 0 when every check passes, 1 when one fails, and 2 on a usage
or configuration error.  JSON reports are deterministic for a fixed config
apart from ``wall_time``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import verify
from .core import HeisenbergError, UsageError, random_homomorphism, sample_unit_sphere
from .degree import degree_smooth
from .differential import contact_report, pansu_estimate, pansu_quotient
from .geodesic import TWO_PI
from .lipschitz import lipschitz_scan, same_height_isometry_check, sample_pairs
from .maps import MapHandle, catalog_map
from .rng import stream

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("json", "csv", "text")


@dataclass
class RunConfig:
    n: int = 1
    seed: int = 42
    tol: float = 1e-10
    samples: int = 10_000
    format: str = "json"
    out: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.n < 1:
            raise UsageError("--n must be >= 1")
        if self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise UsageError("--tol must be a positive finite number")
        if self.format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


@dataclass
class Report:
    command: str
    config: dict
    results: list
    wall_time: float = 0.0
    extra_csv: object = None  # rows for csv output that are not checks

    @property
    def failed(self) -> bool:
        return any(r.status == "fail" for r in self.results)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "results": [r.to_dict() for r in sorted(self.results, key=lambda r: r.name)],
            "wall_time": self.wall_time,
        }


# --- serialisation ------------------------------------------------------------


def _num(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats at 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (dict, list, tuple)):
        return dumps(v, indent=0).replace("\n", "")
    return "" if v is None else str(v)


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return dumps(report.to_dict()) + "\n"
    if fmt == "csv":
        if report.extra_csv is not None:
            buf = io.StringIO()
            report.extra_csv.write_csv(buf)
            return buf.getvalue()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "observed", "expected", "tolerance"])
        for r in sorted(report.results, key=lambda r: r.name):
            w.writerow([r.name, r.status, _cell(r.observed), _cell(r.expected), _cell(r.tolerance)])
        return buf.getvalue()
    lines = [f"{report.command}  n={report.config['n']} seed={report.config['seed']}"]
    for r in sorted(report.results, key=lambda r: r.name):
        lines.append(f"  {r.status.upper():4s}  {r.name}: observed {_cell(r.observed)}, expected {_cell(r.expected)}")
    ok = sum(r.status == "pass" for r in report.results)
    bad = sum(r.status == "fail" for r in report.results)
    lines.append(f"{ok} passed, {bad} failed, {report.wall_time:.2f}s")
    return "\n".join(lines) + "\n"


# --- commands ---------------------------------------------------------------------


def _parse_point(text: str | None, n: int, default):
    if text is None:
        return np.asarray(default, dtype=float)
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc
    if len(vals) != 2 * n + 1:
        raise UsageError(f"point needs {2 * n + 1} comma-separated coordinates for n={n}")
    return np.asarray(vals)


def _map_from(cfg: RunConfig, default: str) -> MapHandle:
    name = cfg.params.get("map") or default
    param = cfg.params.get("param")
    if name == "homomorphism" and param is None:
        param = random_homomorphism(stream(cfg.seed, "cli.homomorphism"), cfg.n)
    elif name in ("left_translation", "right_translation") and param is not None:
        param = _parse_point(param, cfg.n, None)
    return catalog_map(name, cfg.n, param)


def cmd_verify_all(cfg: RunConfig) -> Report:
    return Report("verify-all", cfg.echo(), verify.run_all(cfg))


def cmd_degree(cfg: RunConfig) -> Report:
    n = cfg.n
    m = _map_from(cfg, "extension_F")
    target = _parse_point(cfg.params.get("target"), n, np.r_[np.zeros(2 * n), TWO_PI])
    per_axis = cfg.params.get("per_axis")
    res = degree_smooth(m, target, per_axis=per_axis, seed=cfg.seed)
    info = {"preimages": [p.to_array().tolist() for p in res.preimages], "signs": res.jacobian_signs,
            "boundary_distance": res.boundary_distance}
    results = [verify.Check(f"degree.{m.kind}", "pass" if res.regular else "fail", res.value,
                            "integer at a regular value", None, info)]
    is_F = m.kind in ("extension_F", "extension_F_alt_slice") and np.allclose(target[:-1], 0.0) \
        and abs(target[-1] - TWO_PI) < 1e-12
    if is_F:
        results[0] = verify.Check("degree_F_tilde", "pass" if res.value == (-1) ** n else "fail",
                                  res.value, (-1) ** n, 0, info)
    if m.kind in ("extension_F", "extension_F_alt_slice"):
        other = MapHandle.extension_F(n, alt_slice=m.kind == "extension_F")
        alt = degree_smooth(other, target, per_axis=per_axis, seed=cfg.seed)
        results.append(verify.Check("degree.slice_matrix_variants_agree",
                                    "pass" if alt.value == res.value else "fail",
                                    alt.value, res.value, 0, {"variant": other.kind}))
    return Report("degree", cfg.echo(), results)


def cmd_scan(cfg: RunConfig) -> Report:
    m = _map_from(cfg, "boundary_f")
    s_range = (cfg.params.get("s_min", 1e-3), cfg.params.get("s_max", TWO_PI - 1e-3))
    same = bool(cfg.params.get("same_height"))
    rep = lipschitz_scan(m, cfg.samples, cfg.seed, s_range, same_height=same)
    results = [verify.Check("lipschitz.max_ratio", "info", rep.max_ratio, None, None, rep.to_dict()),
               verify.Check("lipschitz.p95_ratio", "info", rep.p95_ratio, None, None)]
    if same and m.kind == "boundary_f":
        iso = same_height_isometry_check(cfg.samples, cfg.seed, cfg.n, s_range)
        results.append(verify._bound("lipschitz.same_height_isometry", iso.max_ratio, cfg.tol, cfg.tol))
    pairs = None
    if cfg.format == "csv":
        pairs, _ = sample_pairs(m, cfg.samples, cfg.seed, s_range, same)
    return Report("scan-lipschitz", cfg.echo(), results, extra_csv=pairs)


def cmd_pansu(cfg: RunConfig) -> Report:
    n = cfg.n
    m = _map_from(cfg, "dilation")
    rng = stream(cfg.seed, "cli.pansu")
    default_p = np.r_[np.full(2 * n, 0.1), TWO_PI] if m.kind.startswith("extension_F") else 0.5 * rng.normal(size=2 * n + 1)
    p = _parse_point(cfg.params.get("point"), n, default_p)
    probes = sample_unit_sphere(rng, n, 16)
    scales = cfg.params.get("scales") or [0.5, 0.1, 0.02]
    est = pansu_estimate(m, p, scales, probes, tol=max(cfg.tol, 1e-6))
    drift = float(np.max(np.abs(pansu_quotient(m, p, probes, scales[0]) - pansu_quotient(m, p, probes, scales[-1]))))
    results = [
        verify.Check("pansu.converged", "pass" if est.converged else "fail", est.converged, True, None,
                     {"residuals": est.residuals, "scales": est.scales, "diagnostics": est.diagnostics}),
        verify.Check("pansu.fitted_lambda", "info", est.hom.lam, None, None, {"M": est.hom.M.tolist()}),
        verify.Check("pansu.scale_drift", "info", drift, None, None),
    ]
    return Report("pansu", cfg.echo(), results)


def cmd_contact(cfg: RunConfig) -> Report:
    n = cfg.n
    m = _map_from(cfg, "even_reflection")
    rng = stream(cfg.seed, "cli.contact")
    default_p = np.r_[np.full(2 * n, 0.1), TWO_PI] if m.kind.startswith("extension_F") else rng.normal(size=2 * n + 1)
    p = _parse_point(cfg.params.get("point"), n, default_p)
    c = contact_report(m, p)
    results = [
        verify.Check("contact.lambda", "info", c.lam, None, None),
        verify.Check("contact.jacobian_det", "info", c.jac_det, None, None),
        verify.Check("contact.residual", "pass" if c.residual <= 1e-8 else "fail", c.residual, "<= 1e-08", 1e-8),
        verify._bound("contact.det_identity_gap", c.det_identity_gap, 1e-6, 1e-6),
    ]
    return Report("contact", cfg.echo(), results)


def cmd_geodesic(cfg: RunConfig) -> Report:
    return Report("geodesic", cfg.echo(), verify.check_geodesic(cfg.n, cfg.seed, cfg.tol, min(cfg.samples, 1000)))


COMMANDS = {
    "verify-all": cmd_verify_all,
    "degree": cmd_degree,
    "scan-lipschitz": cmd_scan,
    "pansu": cmd_pansu,
    "contact": cmd_contact,
    "geodesic": cmd_geodesic,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=1)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--format", default="json", choices=FORMATS)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    p = _Parser(prog="heisenlab", description="Heisenberg-group verification tools")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("verify-all", parents=[common], help="run every check for --n")
    d = sub.add_parser("degree", parents=[common], help="mapping degree over Ω")
    d.add_argument("--map", default="extension_F")
    d.add_argument("--param", default=None)
    d.add_argument("--target", default=None, help="comma-separated coordinates, default (0,0,2π)")
    d.add_argument("--per-axis", dest="per_axis", type=int, default=None)
    s = sub.add_parser("scan-lipschitz", parents=[common], help="distance-ratio scan on H")
    s.add_argument("--map", default="boundary_f")
    s.add_argument("--param", default=None)
    s.add_argument("--same-height", dest="same_height", action="store_true")
    s.add_argument("--s-min", dest="s_min", type=float, default=1e-3)
    s.add_argument("--s-max", dest="s_max", type=float, default=TWO_PI - 1e-3)
    for name, default in (("pansu", "dilation"), ("contact", "even_reflection")):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("--map", default=default)
        c.add_argument("--param", default=None)
        c.add_argument("--point", default=None)
        if name == "pansu":
            c.add_argument("--scales", type=lambda v: [float(x) for x in v.split(",")], default=None)
    sub.add_parser("geodesic", parents=[common], help="geodesic roundtrip checks")
    return p


def parse_config(argv) -> tuple[str, RunConfig]:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    base = {k: ns.pop(k) for k in ("n", "seed", "tol", "samples", "format", "out")}
    params = {k: v for k, v in ns.items() if v is not None and v is not False}
    return command, RunConfig(**base, params=params).validate()


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        command, cfg = parse_config(argv)
        t0 = time.perf_counter()
        report = COMMANDS[command](cfg)
    except (HeisenbergError, ValueError) as exc:
        print(f"heisenlab: {exc}", file=stderr)
        return EXIT_USAGE
    report.wall_time = round(time.perf_counter() - t0, 6)
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_FAIL if report.failed else EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
