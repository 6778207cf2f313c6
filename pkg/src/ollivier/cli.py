"""Command-line front end.

Every failure prints ``{"error": {"code", "exit_status", "message", ...}}``
on stderr and exits with the error's status; see ``ERROR_CODES``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import importlib.util
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .curvature import (OperatorMatrix, check_operator, curvature_map, ric_ct, ric_eps, ric_profile, scal,
                        thread_count)
from .errors import ConfigError, OllivierError, UnknownVertexError
from .flow import FlowLaw, flow_run
from .graph import Metric, WeightedGraph, load_graph
from .numeric import format_number, parse_number
from .polytope import f_cyc, lambda_bound, pieces_bound
from .transport import w1
from .walks import FiniteMeasure, make_walk

COMMANDS = ("w1", "curvature", "profile", "scalar", "bound", "flow", "check-operator")


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    metric: str = "eta"
    walk: str = "beta"
    arith: str = "rational"
    out: str | None = None
    format: str | None = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != "bound" and not self.graph:
            raise ConfigError(f"{self.command} needs --graph")
        if self.arith not in ("rational", "float"):
            raise ConfigError(f"--arith must be rational or float, not {self.arith!r}")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"--format must be csv or json, not {self.format!r}")
        kind = self.walk.split(":", 1)[0]
        if kind not in ("beta", "zeta", "xi", "poly", "heat", "custom", "constant"):
            raise ConfigError(f"unknown walk {self.walk!r}")
        if kind in ("poly", "custom") and ":" not in self.walk:
            raise ConfigError(f"walk {kind} needs a path: {kind}:PATH")
        mkind = self.metric.split(":", 1)[0]
        if mkind not in ("combinatorial", "omega", "eta", "matrix"):
            raise ConfigError(f"unknown metric {self.metric!r}")


def parse_graph_file(path) -> WeightedGraph:
    """Read and validate a graph JSON file (``m`` defaults to 1, ``eta`` to ``omega``)."""
    return load_graph(path)


def _read_json(path, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path}: malformed JSON at line {exc.lineno}: {exc.msg}", line=exc.lineno) from None
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path}: {exc}") from None


def build_metric(g: WeightedGraph, spec: str) -> Metric:
    if spec.startswith("matrix:"):
        met = Metric.from_json(_read_json(spec.split(":", 1)[1], "metric matrix"))
        if set(met.vertices) != set(g.vertices):
            raise ConfigError("metric matrix must cover exactly the graph's vertices")
        return met
    return Metric.from_graph(g, spec)


def _load_custom(path: str, g, d) -> tuple:
    spec = importlib.util.spec_from_file_location("ollivier_custom_walk", path)
    if spec is None or spec.loader is None:
        raise ConfigError(f"cannot load custom walk module {path}")
    module = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(module)
    except (OSError, SyntaxError) as exc:
        raise ConfigError(f"cannot load custom walk module {path}: {exc}") from None
    if not hasattr(module, "walk"):
        raise ConfigError("custom walk module must define walk(graph, metric) -> (evaluate, derivative, hull)")
    return tuple(module.walk(g, d))


def build_walk(g: WeightedGraph, d: Metric, spec: str, arith: str):
    kind, _, arg = spec.partition(":")
    if kind == "xi":
        return make_walk("xi", g, d, p=parse_number(arg) if arg else 1)
    if kind == "poly":
        return make_walk("poly", g, d, table=_read_json(arg, "polynomial walk"))
    if kind == "custom":
        return make_walk("custom", g, d, custom=_load_custom(arg, g, d), arithmetic=arith)
    return make_walk(kind, g, d, arithmetic="float" if kind == "heat" else arith)


def _vertex(g: WeightedGraph, token):
    if token in g:
        return token
    with contextlib.suppress(ValueError):
        as_int = int(token)
        if as_int in g:
            return as_int
    raise UnknownVertexError(f"unknown vertex {token!r}", vertex=token)


def _pair(g, text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected an edge as u,v, got {text!r}")
    return _vertex(g, parts[0].strip()), _vertex(g, parts[1].strip())


class Output:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def num(self, value):
        if isinstance(value, float) or self.cfg.arith == "float":
            return format_number(float(value))
        return format_number(value)


def _eps(cfg: RunConfig):
    raw = cfg.options.get("eps")
    if raw is None:
        raise ConfigError("this mode needs --eps")
    value = parse_number(raw)
    return float(value) if cfg.walk.startswith("heat") else value


def _setup(cfg: RunConfig):
    g = parse_graph_file(cfg.graph)
    d = build_metric(g, cfg.metric)
    walk = build_walk(g, d, cfg.walk, cfg.arith)
    return g, d, walk


def _cmd_w1(cfg, out, fmt):
    g, d, walk = _setup(cfg)
    if cfg.options.get("mu") and cfg.options.get("nu"):
        def load(text):
            obj = json.loads(text) if text.lstrip().startswith("{") else _read_json(text, "measure")
            return FiniteMeasure({_vertex(g, k): parse_number(v) for k, v in obj.items()})
        mu, nu = load(cfg.options["mu"]), load(cfg.options["nu"])
    else:
        if not cfg.options.get("edge"):
            raise ConfigError("w1 needs --edge u,v with --eps, or --mu and --nu")
        x, y = _pair(g, cfg.options["edge"])
        eps = _eps(cfg)
        mu, nu = walk.evaluate(x, eps), walk.evaluate(y, eps)
    plan = w1(d, mu, nu)
    o = Output(cfg)
    if fmt == "json":
        json.dump({"value": o.num(plan.value),
                   "coupling": [{"u": u, "v": v, "mass": o.num(q)} for (u, v), q in plan.coupling.items()]},
                  out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["u", "v", "mass"])
        for (u, v), q in plan.coupling.items():
            w.writerow([u, v, o.num(q)])
    else:
        out.write(o.num(plan.value) + "\n")


def _cmd_curvature(cfg, out, fmt):
    g, d, walk = _setup(cfg)
    mode = cfg.options.get("mode") or "ct"
    if mode not in ("ct", "eps"):
        raise ConfigError("--mode must be ct or eps")
    eps = _eps(cfg) if mode == "eps" else None
    o = Output(cfg)
    if cfg.options.get("edge"):
        x, y = _pair(g, cfg.options["edge"])
        value = ric_ct(g, d, walk, x, y) if mode == "ct" else ric_eps(g, d, walk, x, y, eps)
        if fmt == "json":
            json.dump({"u": x, "v": y, "d": o.num(d.finite(x, y)), "ric": o.num(value)}, out)
            out.write("\n")
        elif fmt == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["u", "v", "d", "ric"])
            w.writerow([x, y, o.num(d.finite(x, y)), o.num(value)])
        else:
            out.write(o.num(value) + "\n")
        return
    values = curvature_map(g, d, walk, mode, eps, threads=thread_count())
    if fmt == "json":
        json.dump([{"u": u, "v": v, "d": o.num(d.finite(u, v)), "ric": o.num(k)} for (u, v), k in values.items()],
                  out, indent=2)
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["u", "v", "d", "ric"])
        for (u, v), k in values.items():
            w.writerow([u, v, o.num(d.finite(u, v)), o.num(k)])


def _cmd_profile(cfg, out, fmt):
    g, d, walk = _setup(cfg)
    if not cfg.options.get("edge"):
        raise ConfigError("profile needs --edge u,v")
    x, y = _pair(g, cfg.options["edge"])
    budget = cfg.options.get("budget")
    prof = ric_profile(g, d, walk, x, y, piece_budget=int(budget) if budget else None)
    data = prof.to_json()
    if cfg.arith == "float":
        to_f = lambda s: format_number(float(Fraction(s)))  # noqa: E731
        data["domain"] = [to_f(v) for v in data["domain"]]
        for pc in data["pieces"]:
            pc["lo"], pc["hi"] = to_f(pc["lo"]), to_f(pc["hi"])
            pc["coeffs"] = [to_f(c) for c in pc["coeffs"]]
        for sw in data["switches"]:
            for k in ("eps", "left_slope", "right_slope"):
                sw[k] = to_f(sw[k])
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["lo", "hi", "coeffs"])
        for pc in data["pieces"]:
            w.writerow([pc["lo"], pc["hi"], " ".join(pc["coeffs"])])
    else:
        json.dump(data, out, indent=2)
        out.write("\n")


def _cmd_scalar(cfg, out, fmt):
    g, d, walk = _setup(cfg)
    mode = cfg.options.get("mode") or "ct"
    eps = _eps(cfg) if mode == "eps" else None
    o = Output(cfg)
    if cfg.options.get("vertex"):
        verts = [_vertex(g, cfg.options["vertex"])]
    else:
        verts = list(g.vertices)
    values = {v: scal(g, d, walk, v, mode, eps) for v in verts}
    if cfg.options.get("vertex") and fmt is None:
        out.write(o.num(values[verts[0]]) + "\n")
    elif fmt == "json":
        json.dump([{"id": v, "scal": o.num(s)} for v, s in values.items()], out, indent=2)
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "scal"])
        for v, s in values.items():
            w.writerow([v, o.num(s)])


def _int_option(cfg, name):
    raw = cfg.options.get(name)
    if raw is None:
        return None
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"--{name} must be an integer") from None


def _cmd_bound(cfg, out, fmt):
    N, m = _int_option(cfg, "N"), _int_option(cfg, "m")
    hull, degree = _int_option(cfg, "hull"), _int_option(cfg, "degree")
    payload = {}
    try:
        if N is not None and m is not None:
            bd = lambda_bound(N, m)
            payload = {"Lambda": bd.value, "breakdown": bd.as_dict()}
            if 1 <= N < m:
                payload["f_cyc"] = f_cyc(N, m)
        if hull is not None:
            payload["pieces_bound"] = pieces_bound(hull, degree if degree is not None else 1)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    if not payload:
        raise ConfigError("bound needs --N and --m, or --hull [--degree]")
    json.dump(payload, out, indent=2)
    out.write("\n")


def _cmd_flow(cfg, out, fmt):
    g = parse_graph_file(cfg.graph)
    law_kind = cfg.options.get("law") or "classic"
    walk_spec = cfg.walk

    def walk_factory(graph, metric):
        return build_walk(graph, metric, walk_spec, "rational")

    law = FlowLaw(law_kind, walk=walk_factory)
    d0 = build_metric(g, cfg.metric) if law.evolves_distance and cfg.metric.startswith("matrix:") else None
    t_end = float(parse_number(cfg.options.get("t_end") or 1))
    dt = float(parse_number(cfg.options.get("dt") or Fraction(1, 100)))
    threshold = float(parse_number(cfg.options.get("threshold") or "1e-9"))
    traj = flow_run(g, law, t_end, dt, threshold, d0)
    if fmt == "json":
        traj.write_json(out, every=_int_option(cfg, "snapshot_every") or 1)
    else:
        traj.write_csv(out)
    if traj.reason != "completed":
        sys.stderr.write(json.dumps({"halted": traj.reason, "message": traj.message}) + "\n")


def _cmd_check_operator(cfg, out, fmt):
    g = parse_graph_file(cfg.graph)
    spec = cfg.options.get("operator") or "laplacian"
    if spec in ("laplacian", "general"):
        L = OperatorMatrix.laplacian(g, "general")
    elif spec in ("combinatorial", "normalized"):
        L = OperatorMatrix.laplacian(g, spec)
    elif spec == "identity":
        L = OperatorMatrix.identity(g.vertices)
    elif spec.startswith("matrix:"):
        obj = _read_json(spec.split(":", 1)[1], "operator matrix")
        try:
            L = OperatorMatrix.from_dense(obj["vertices"], [[parse_number(v) for v in row] for row in obj["L"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed operator matrix: {exc}") from None
    else:
        raise ConfigError(f"unknown operator {spec!r}")
    report = check_operator(g, L).as_dict()
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(list(report))
        w.writerow(["true" if v else "false" for v in report.values()])
    else:
        json.dump(report, out)
        out.write("\n")


HANDLERS = {"w1": _cmd_w1, "curvature": _cmd_curvature, "profile": _cmd_profile, "scalar": _cmd_scalar,
            "bound": _cmd_bound, "flow": _cmd_flow, "check-operator": _cmd_check_operator}


def dispatch(cfg: RunConfig) -> int:
    """Run a validated configuration; returns the process exit status."""
    cfg.validate()
    buf = io.StringIO()
    HANDLERS[cfg.command](cfg, buf, cfg.format)
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise ConfigError(f"cannot write {cfg.out}: {exc}") from None
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph JSON file")
    common.add_argument("--metric", help="combinatorial, omega, eta (default) or matrix:PATH")
    common.add_argument("--walk", help="beta (default), zeta, xi:p, poly:PATH, heat, custom:PATH, constant")
    common.add_argument("--arith", choices=("rational", "float"))
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--config", help="JSON file of option defaults; flags override it")

    parser = argparse.ArgumentParser(prog="ollivier", description="Ollivier-Ricci curvature of weighted graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("w1", parents=[common], help="Wasserstein-1 distance")
    p.add_argument("--edge")
    p.add_argument("--eps")
    p.add_argument("--mu", help="measure as inline JSON or a JSON file")
    p.add_argument("--nu")

    p = sub.add_parser("curvature", parents=[common], help="edge curvature (one edge or all)")
    p.add_argument("--edge")
    p.add_argument("--mode", choices=("ct", "eps"))
    p.add_argument("--eps")

    p = sub.add_parser("profile", parents=[common], help="piecewise curvature profile in eps")
    p.add_argument("--edge")
    p.add_argument("--budget")

    p = sub.add_parser("scalar", parents=[common], help="scalar curvature")
    p.add_argument("--vertex")
    p.add_argument("--mode", choices=("ct", "eps"))
    p.add_argument("--eps")

    p = sub.add_parser("bound", parents=[common], help="polytope vertex bound and piece budget")
    p.add_argument("--N")
    p.add_argument("--m")
    p.add_argument("--hull")
    p.add_argument("--degree")

    p = sub.add_parser("flow", parents=[common], help="curvature flow trajectory")
    p.add_argument("--law", choices=("classic", "classic-with-mass", "coupled-distance"))
    p.add_argument("--t-end", dest="t_end")
    p.add_argument("--dt")
    p.add_argument("--threshold")
    p.add_argument("--snapshot-every", dest="snapshot_every")

    p = sub.add_parser("check-operator", parents=[common], help="algebraic operator predicates")
    p.add_argument("--operator", help="laplacian (default), combinatorial, normalized, identity or matrix:PATH")
    return parser


_COMMON_KEYS = ("graph", "metric", "walk", "arith", "out", "format")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if ns.config:
        loaded = _read_json(ns.config, "config")
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, val in vars(ns).items():
        if key not in ("command", "config") and val is not None:
            values[key] = val
    common = {k: values.pop(k) for k in _COMMON_KEYS if k in values}
    cfg = RunConfig(ns.command, **{k: v for k, v in common.items()})
    cfg.options = {k: (str(v) if not isinstance(v, str) else v) for k, v in values.items()}
    return cfg


def _emit_error(exc: OllivierError) -> int:
    sys.stderr.write(json.dumps(exc.to_json()) + "\n")
    return exc.exit_status


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return dispatch(cfg)
    except OllivierError as exc:
        return _emit_error(exc)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        return _emit_error(ConfigError(f"invalid input: {exc}"))


if __name__ == "__main__":
    sys.exit(main())
