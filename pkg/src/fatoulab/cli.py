"""Command-line front end: parse flags and an optional JSON config, run one
command, write its file. This module owns every file handle.

Exit codes: 0 success (or a passing check), 1 usage error, 2 runtime error,
3 a check that ran and failed (its report is still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import fatou, orbit, psv, render, verify
from .errors import FatouLabError, MarginInconclusive
from .mapcat import MeromorphicMap, Window

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_FAILED = 0, 1, 2, 3

DEFAULT_WINDOWS = {
    "nf": (-10.0, -10.0, 10.0, 10.0),
    "ng": (-6.0, -6.0, 6.0, 6.0),
    "nh": (-6.0, -8.0, 6.0, 8.0),
    "fh": (-4.0, -4.0, 4.0, 4.0),
    "gfh": (-1.0, -2.0, 4.0, 2.0),
}


class UsageError(Exception):
    pass


def parse_complex(text) -> complex:
    """"re,im" (or a bare real, or a [re, im] list from JSON)."""
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise UsageError(f"complex value needs two parts: {text!r}")
        return complex(float(text[0]), float(text[1]))
    if isinstance(text, (int, float)):
        return complex(text)
    parts = str(text).split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"expected \"re,im\", got {text!r}")


def parse_floats(text, count: int | None = None) -> tuple[float, ...]:
    vals = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        out = tuple(float(v) for v in vals)
    except ValueError:
        raise UsageError(f"expected comma separated numbers, got {text!r}") from None
    if count is not None and len(out) != count:
        raise UsageError(f"expected {count} numbers, got {text!r}")
    return out


# option name -> (commands, default); None marks "map specific" or required
OPTIONS = {
    "map": (("render", "orbit", "psv", "distance", "verify"), None),
    "alpha": (("render", "orbit", "psv", "distance", "verify"), None),
    "beta": (("render", "orbit", "psv", "distance", "verify"), None),
    "window": (("render", "psv"), None),
    "res": (("render",), "512"),
    "max_iter": (("render", "orbit", "distance", "verify"), None),
    "escape_radius": (("render", "orbit", "distance", "verify"), None),
    "tol_conv": (("render", "orbit", "distance", "verify"), None),
    "z0": (("orbit",), None),
    "n": (("orbit",), None),
    "depth": (("psv", "verify"), None),
    "z": (("distance",), None),
    "rays": (("distance", "verify"), None),
    "rmax": (("distance", "verify"), None),
    "disk": (("distance",), False),
    "check": (("verify",), None),
    "k": (("verify",), None),
    "samples": (("verify",), None),
    "offset": (("verify",), None),
    "half_width": (("verify",), None),
    "c": (("verify",), None),
    "r": (("verify",), None),
    "grid_n": (("verify",), None),
    "seed_z": (("verify",), None),
    "n_max": (("verify",), None),
    "radii": (("verify",), None),
    "mode": (("verify",), None),
    "M": (("verify",), None),
    "R": (("verify",), None),
    "out": (("render", "orbit", "psv", "distance", "verify"), None),
    "workers": (("render", "orbit", "psv", "distance", "verify"), 1),
    "rng_seed": (("render", "orbit", "psv", "distance", "verify"), verify.DEFAULT_SEED),
}

CHECK_IDS = ("semiconjugacy", "anchors", "invariant_line", "strip", "contraction",
             "theorem_a", "theorem_b", "corollary_c", "theorem_d", "corollary_e")


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    @property
    def workers(self) -> int:
        return int(self.options.get("workers", 1))

    def get(self, key, default=None):
        v = self.options.get(key)
        return default if v is None else v

    def echo(self) -> dict:
        """Effective config written into outputs. The worker count is left
        out so that outputs stay byte-identical across worker counts."""
        opts = {k: v for k, v in sorted(self.options.items())
                if v is not None and k not in ("workers", "out")}
        return {"command": self.command, **opts}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fatoulab", description="Fatou components and postsingular sets "
                "of transcendental meromorphic maps")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; flags win")
    common.add_argument("--map", choices=("nf", "ng", "nh", "fh", "gfh"))
    common.add_argument("--alpha", help="NH alpha as re,im")
    common.add_argument("--beta", help="NH beta as re,im")
    common.add_argument("--out")
    common.add_argument("--workers", type=int)
    common.add_argument("--rng-seed", dest="rng_seed", type=int)
    iters = _Parser(add_help=False)
    iters.add_argument("--max-iter", dest="max_iter", type=int)
    iters.add_argument("--escape-radius", dest="escape_radius", type=float)
    iters.add_argument("--tol-conv", dest="tol_conv", type=float)

    r = sub.add_parser("render", parents=[common, iters], help="classify and draw a window")
    r.add_argument("--window", help="x0,y0,x1,y1")
    r.add_argument("--res", help="N or NX,NY")

    o = sub.add_parser("orbit", parents=[common, iters], help="forward orbit as CSV")
    o.add_argument("--z0")
    o.add_argument("--n", type=int)

    s = sub.add_parser("psv", parents=[common], help="postsingular cloud as CSV")
    s.add_argument("--window")
    s.add_argument("--depth", type=int)

    d = sub.add_parser("distance", parents=[common, iters], help="boundary distance at a point")
    d.add_argument("--z")
    d.add_argument("--rays", type=int)
    d.add_argument("--rmax", type=float)
    d.add_argument("--disk", action="store_true", default=None,
                   help="inscribed disk radius (at least 64 rays)")

    v = sub.add_parser("verify", parents=[common, iters], help="run one check, JSON report")
    v.add_argument("--check", choices=CHECK_IDS)
    v.add_argument("--k", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--offset", type=float)
    v.add_argument("--half-width", dest="half_width", type=float)
    v.add_argument("--c", help="disk center re,im")
    v.add_argument("--r", type=float)
    v.add_argument("--grid-n", dest="grid_n", type=int)
    v.add_argument("--seed-z", dest="seed_z", help="orbit seed re,im")
    v.add_argument("--n-max", dest="n_max", type=int)
    v.add_argument("--depth", type=int)
    v.add_argument("--radii", help="r0,ratio,count")
    v.add_argument("--mode", choices=("bounded", "growing"))
    v.add_argument("--rays", type=int)
    v.add_argument("--rmax", type=float)
    v.add_argument("--M", type=float)
    v.add_argument("--R", type=float)
    return p


def _attach_negative_values(argv) -> list[str]:
    """Turn "--window -1,-1,1,1" into "--window=-1,-1,1,1" so argparse does not
    read the value as an option."""
    out = list(argv)
    merged: list[str] = []
    i = 0
    while i < len(out):
        tok = out[i]
        nxt = out[i + 1] if i + 1 < len(out) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None and len(nxt) > 1
                and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            merged.append(f"{tok}={nxt}")
            i += 2
            continue
        merged.append(tok)
        i += 1
    return merged


def load_config(argv) -> RunConfig:
    args = build_parser().parse_args(_attach_negative_values(list(argv)))
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    merged: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        if "command" in data and data.pop("command") != args.command:
            raise UsageError("config command does not match the subcommand")
        if isinstance(data.get("map"), dict):
            spec = data.pop("map")
            try:
                m = MeromorphicMap.from_config(spec)
            except (ValueError, TypeError) as exc:
                raise UsageError(str(exc)) from None
            data["map"] = m.map_id
            if m.map_id == "nh":
                data.setdefault("alpha", [m.alpha.real, m.alpha.imag])
                data.setdefault("beta", [m.beta.real, m.beta.imag])
        unknown = [k for k in data if k not in OPTIONS or args.command not in OPTIONS[k][0]]
        if unknown:
            raise UsageError(f"unknown config keys for {args.command}: {sorted(unknown)}")
        merged.update(data)
    for k, v in flags.items():
        if v is not None:
            merged[k] = v
    for k, (cmds, default) in OPTIONS.items():
        if args.command in cmds and merged.get(k) is None and default is not None:
            merged[k] = default
    if int(merged.get("workers", 1)) < 1:
        raise UsageError("workers must be >= 1")
    return RunConfig(args.command, merged)


def _map(cfg: RunConfig, required: bool = True) -> MeromorphicMap | None:
    map_id = cfg.get("map")
    if map_id is None:
        if required:
            raise UsageError("--map is required")
        return None
    if map_id == "nh":
        if cfg.get("alpha") is None or cfg.get("beta") is None:
            raise UsageError("nh needs --alpha and --beta")
        return MeromorphicMap.nh(parse_complex(cfg.get("alpha")), parse_complex(cfg.get("beta")))
    try:
        return MeromorphicMap(map_id)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _iter_params(cfg: RunConfig, m: MeromorphicMap) -> orbit.IterParams:
    over = {k: cfg.get(k) for k in ("max_iter", "escape_radius", "tol_conv")
            if cfg.get(k) is not None}
    return orbit.IterParams.for_map(m, **over)


def _require(cfg: RunConfig, key: str):
    v = cfg.get(key)
    if v is None:
        raise UsageError(f"--{key.replace('_', '-')} is required for {cfg.command}")
    return v


def _write(cfg: RunConfig, data: bytes | str, default_name: str) -> Path:
    path = Path(cfg.get("out") or default_name)
    if isinstance(data, str):
        data = data.encode()
    path.write_bytes(data)
    return path


def _csv_with_config(cfg: RunConfig, body: str) -> str:
    return "# fatoulab-config: " + json.dumps(cfg.echo(), sort_keys=True) + "\n" + body


def cmd_render(cfg: RunConfig) -> int:
    m = _map(cfg)
    window = Window(*parse_floats(cfg.get("window") or DEFAULT_WINDOWS[m.map_id], 4))
    cfg.options["window"] = list(window)
    res = parse_floats(cfg.get("res"))
    if len(res) == 1:
        res = (res[0], res[0])
    if len(res) != 2 or any(r != int(r) for r in res):
        raise UsageError(f"bad --res {cfg.get('res')!r}")
    res_x, res_y = int(res[0]), int(res[1])
    if res_x < 2 or res_y < 2:
        raise UsageError("--res must be at least 2")
    params = _iter_params(cfg, m)
    cfg.options.update(params.to_dict())
    grid = fatou.classify_grid(m, window, (res_x, res_y), params, cfg.workers)
    rgb = render.colorize(grid.labels)
    out = cfg.get("out") or f"{m.map_id}.png"
    meta = cfg.echo() | {"map_config": m.to_config(),
                         "attractors": [[a.real, a.imag] for a in grid.attractors]}
    if str(out).lower().endswith(".ppm"):
        data = render.encode_ppm(rgb, meta)
    else:
        data = render.encode_png(rgb, meta)
    path = _write(cfg, data, out)
    print(f"wrote {path} ({res_x}x{res_y}, {len(grid.attractors)} attractors)")
    return EXIT_OK


def cmd_orbit(cfg: RunConfig) -> int:
    m = _map(cfg)
    z0 = parse_complex(_require(cfg, "z0"))
    params = _iter_params(cfg, m)
    if cfg.get("n") is not None:
        params = orbit.IterParams(int(cfg.get("n")), params.escape_radius, params.tol_conv)
    cfg.options.update(params.to_dict())
    run = orbit.iterate_with(m, z0, params)
    path = _write(cfg, _csv_with_config(cfg, orbit.orbit_csv(run)), "orbit.csv")
    print(f"wrote {path}: {run.verdict}")
    return EXIT_OK


def cmd_psv(cfg: RunConfig) -> int:
    m = _map(cfg)
    window = Window(*parse_floats(cfg.get("window") or DEFAULT_WINDOWS[m.map_id], 4))
    cfg.options["window"] = list(window)
    depth = int(_require(cfg, "depth"))
    cloud = psv.build_cloud(m, window, depth)
    path = _write(cfg, _csv_with_config(cfg, cloud.to_csv()), "psv.csv")
    print(f"wrote {path}: {len(cloud)} points")
    return EXIT_OK


def cmd_distance(cfg: RunConfig) -> int:
    m = _map(cfg)
    z = parse_complex(_require(cfg, "z"))
    params = _iter_params(cfg, m)
    cfg.options.update(params.to_dict())
    rays = int(cfg.get("rays", 32))
    r_max = float(cfg.get("rmax", 4.0))
    if cfg.get("disk"):
        res = fatou.inscribed_disk_radius(m, z, params, r_max=r_max, ray_count=rays)
    else:
        res = fatou.boundary_distance(m, z, params, ray_count=rays, r_max=r_max)
    doc = {"config": cfg.echo(), "distance": res.distance, "lower_bound": res.lower_bound,
           "rays": len(res.ray_distances)}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if cfg.get("out"):
        _write(cfg, text, cfg.get("out"))
    print(text, end="")
    return EXIT_OK


def run_check(cfg: RunConfig) -> verify.VerificationReport:
    check = _require(cfg, "check")
    m = _map(cfg, required=False)
    seed = int(cfg.get("rng_seed", verify.DEFAULT_SEED))
    w = cfg.workers
    if check == "semiconjugacy":
        return verify.check_semiconjugacy(int(cfg.get("samples", 1000)), seed=seed)
    if check == "anchors":
        return verify.check_catalog_anchors()
    if check == "invariant_line":
        return verify.check_invariant_line_nf(int(cfg.get("k", 0)), int(cfg.get("samples", 100)),
                                              float(cfg.get("offset", 0.0)))
    if check == "strip":
        return verify.check_strip_ng(int(cfg.get("k", 0)), int(cfg.get("samples", 500)),
                                     float(cfg.get("half_width", verify.NG_STRIP_HALF_WIDTH)),
                                     seed)
    if check == "contraction":
        m = m or MeromorphicMap("nf")
        c = parse_complex(cfg.get("c", "0,0"))
        grid_n = int(cfg.get("grid_n", 201))
        r = cfg.get("r")
        if r is None:
            if m.map_id != "nh":
                raise UsageError("--r is required for contraction")
            r = verify.nh_contraction_radius(m, c)
        return verify.certify_contraction_disk(m, c, float(r), grid_n)
    if check == "theorem_b":
        m = m or MeromorphicMap("fh")
        return verify.theorem_b_ratio(m, parse_complex(_require(cfg, "seed_z")),
                                      int(cfg.get("n_max", 20)), int(cfg.get("depth", 12)),
                                      iter_params=_iter_params(cfg, m), workers=w)
    if check == "theorem_a":
        m = m or MeromorphicMap("ng")
        radii = parse_floats(cfg.get("radii", "5,1.3,11"), 3)
        return verify.theorem_a_scan(m, parse_complex(_require(cfg, "seed_z")), radii,
                                     int(cfg.get("depth", 12)),
                                     iter_params=_iter_params(cfg, m))
    if check == "corollary_c":
        m = m or MeromorphicMap("nf")
        return verify.corollary_c_disks(m, parse_complex(_require(cfg, "seed_z")),
                                        int(cfg.get("n_max", 30)), cfg.get("mode"),
                                        cfg.get("rmax"), int(cfg.get("rays", 64)),
                                        iter_params=_iter_params(cfg, m), workers=w)
    if check == "theorem_d":
        alpha = parse_complex(cfg.get("alpha", "0,0"))
        beta = parse_complex(cfg.get("beta", "1,0"))
        return verify.theorem_d_winding(alpha, beta, float(cfg.get("M", 100.0)),
                                        float(cfg.get("R", 8.0)))
    if check == "corollary_e":
        alpha = parse_complex(_require(cfg, "alpha"))
        beta = parse_complex(_require(cfg, "beta"))
        if alpha.imag or beta.imag:
            raise UsageError("corollary_e needs real alpha and beta")
        return verify.corollary_e_capture(alpha.real, beta.real)
    raise UsageError(f"unknown check {check!r}")


def cmd_verify(cfg: RunConfig) -> int:
    try:
        rep = run_check(cfg)
    except MarginInconclusive as exc:
        if exc.report is None:
            raise
        rep = exc.report
        rep.notes += "; margin inconclusive: sampled sup and certified sup straddle the threshold"
    doc = rep.to_dict() | {"config": cfg.echo()}
    path = _write(cfg, json.dumps(doc, indent=2, sort_keys=True) + "\n",
                  f"{cfg.get('check')}.json")
    print(f"wrote {path}: {'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_FAILED


COMMANDS = {"render": cmd_render, "orbit": cmd_orbit, "psv": cmd_psv,
            "distance": cmd_distance, "verify": cmd_verify}


def dispatch(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = load_config(sys.argv[1:] if argv is None else argv)
        return dispatch(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FatouLabError, ValueError, OverflowError, ArithmeticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
