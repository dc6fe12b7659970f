"""Command-line interface: ``tanlab <command> [flags]``.

Exit codes: 0 success, 1 computation unresolved / did not converge / check
failed, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from . import __version__, orbit, planes, symbolic, verify
from .errors import NonConvergence, TanlabError
from .mapcore import INFINITY

EXIT_OK, EXIT_UNRESOLVED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_FLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^\s*([+-]?{_FLOAT})([+-]{_FLOAT})i\s*$")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi``; both parts are required."""
    m = _COMPLEX_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not a complex literal of the form a+bi: {text!r}")
    return complex(float(m.group(1)), float(m.group(2)))


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_grid(text: str) -> planes.GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("grid must be cx,cy,w,h,cols,rows")
    try:
        cx, cy, w, h = (float(p) for p in parts[:4])
        cols, rows = int(parts[4]), int(parts[5])
        return planes.GridSpec(complex(cx, cy), w, h, cols, rows)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


def format_grid(g: planes.GridSpec) -> str:
    return ",".join([repr(g.center.real), repr(g.center.imag), repr(float(g.width)),
                     repr(float(g.height)), str(g.cols), str(g.rows)])


def parse_word(text: str) -> symbolic.ItineraryWord:
    try:
        word = symbolic.ItineraryWord.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not word.symbols:
        raise argparse.ArgumentTypeError("word needs at least one symbol")
    return word


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


# (flag, type, default, formatter, choices)
_LAMBDA = ("lambda", parse_complex, None, format_complex, None)
_Z0 = ("z0", parse_complex, 0j, format_complex, None)
_TEXT_FORMATS = ("text", "csv", "json")
_RENDER_FORMATS = ("ppm", "json", "csv")


def _fmt(default, choices):
    return ("format", str, default, str, choices)


def _max_iter(default):
    return ("max-iter", _positive_int, default, str, None)


COMMANDS: dict[str, list[tuple]] = {
    "orbit": [_LAMBDA, _Z0, _max_iter(500), _fmt("text", _TEXT_FORMATS)],
    "cycle": [_LAMBDA, _Z0, _max_iter(500), _fmt("text", ("text", "json"))],
    "fixed-points": [_LAMBDA, _fmt("text", ("text", "json"))],
    "tangency": [_fmt("text", ("text", "json"))],
    "itinerary": [_LAMBDA, _Z0, ("length", _positive_int, 8, str, None),
                  _fmt("text", ("text", "json"))],
    "cylinder": [_LAMBDA, ("word", parse_word, None, str, None), _fmt("text", ("text", "json"))],
    "render-dyn": [_LAMBDA, ("grid", parse_grid, None, format_grid, None),
                   _max_iter(planes.DYNAMICAL_MAX_ITER), ("out", str, None, str, None),
                   _fmt("ppm", _RENDER_FORMATS)],
    "render-param": [("grid", parse_grid, None, format_grid, None),
                     _max_iter(planes.PARAMETER_MAX_ITER), ("out", str, None, str, None),
                     _fmt("ppm", _RENDER_FORMATS)],
    "threshold": [("quadrant", int, 1, str, (1, 2, 3, 4)),
                  ("bound", _positive_float, 10.0, repr, None),
                  ("step", _positive_float, 0.5, repr, None),
                  _fmt("text", ("text", "json"))],
    "verify": [("suite", str, "all", str, tuple(verify.SUITES) + ("all",)),
               _fmt("text", ("text", "json"))],
}


@dataclass
class Command:
    name: str
    flags: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict[str, Any]:
        """Canonical string form of every flag; feeding it back re-parses to ``self``."""
        fmt = {spec[0]: spec[3] for spec in COMMANDS[self.name]}
        return {"command": self.name,
                "flags": {k: fmt[k](v) for k, v in self.flags.items() if v is not None}}

    def argv(self) -> list[str]:
        out = [self.name]
        for k, v in self.echo()["flags"].items():
            out += [f"--{k}", v]
        return out


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tanlab", description="Dynamics of lam + tan(z^2).")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, specs in COMMANDS.items():
        p = sub.add_parser(name)
        for flag, typ, default, _, choices in specs:
            kw: dict[str, Any] = {"dest": flag.replace("-", "_"), "type": typ, "default": default}
            if choices is not None:
                kw["choices"] = choices
            if default is None and flag not in ("out",):
                kw["required"] = True
            p.add_argument(f"--{flag}", **kw)
    return parser


def parse_args(argv: Sequence[str]) -> Command:
    """Parse argv into a :class:`Command`; raises ``SystemExit(2)`` on bad usage."""
    parser = build_parser()
    try:
        ns = parser.parse_args(list(argv))
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None
    flags = {spec[0]: getattr(ns, spec[0].replace("-", "_")) for spec in COMMANDS[ns.command]}
    cmd = Command(ns.command, flags)
    if cmd.name == "fixed-points" and flags["lambda"].imag != 0:
        print("tanlab fixed-points: error: --lambda must be real (imaginary part 0)", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if cmd.name.startswith("render") and flags["format"] == "ppm" and not flags["out"]:
        print(f"tanlab {cmd.name}: error: --format ppm needs --out", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    return cmd


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _num(z) -> Any:
    if z is INFINITY:
        return "inf"
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _json(obj: Mapping) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _status_text(res: orbit.OrbitResult) -> str:
    if res.status is orbit.OrbitStatus.CONVERGED:
        return f"converged period={res.period}"
    if res.status is orbit.OrbitStatus.HIT_POLE:
        return f"hit-pole index={res.pole_index} steps={res.steps_used}"
    return "unresolved"


def _orbit_rows(res: orbit.OrbitResult) -> list[tuple]:
    rows = []
    traj = res.trajectory or []
    for step, z in enumerate(traj):
        last = step == len(traj) - 1
        status = res.status.value if last else "iterate"
        if z is INFINITY:
            rows.append((step, "inf", "inf", status))
        else:
            rows.append((step, repr(z.real), repr(z.imag), status))
    return rows


DEFAULT_PALETTE = {
    planes.BASIN: (32, 64, 160),
    planes.PREPOLE: (255, 255, 255),
    planes.UNRESOLVED: (0, 0, 0),
}
CANTOR_CODE = 3
PARAMETER_PALETTE = {**DEFAULT_PALETTE, CANTOR_CODE: (230, 170, 40)}
SHADE_LEVELS = 16


def raster_rgb(raster: planes.Raster, palette: Mapping[int, tuple[int, int, int]],
               shade: bool = True) -> np.ndarray:
    """uint8 image (rows, cols, 3); basin pixels darken with iteration count."""
    codes = raster.class_codes.astype(np.int64)
    if raster.cantor_flags is not None and CANTOR_CODE in palette:
        codes = np.where(raster.cantor_flags, CANTOR_CODE, codes)
    missing = set(np.unique(codes).tolist()) - set(palette)
    if missing:
        raise ValueError(f"palette has no colour for class codes {sorted(missing)}")
    lut = np.zeros((max(palette) + 1, 3), dtype=np.int64)
    for code, rgb in palette.items():
        lut[code] = rgb
    img = lut[codes]
    if shade:
        level = np.minimum(raster.iter_counts.astype(np.int64), SHADE_LEVELS)
        scale = np.where(codes == planes.UNRESOLVED, 256, 256 - 10 * level)
        img = (img * scale[..., None]) // 256
    return img.astype(np.uint8)


def write_ppm(raster: planes.Raster, palette: Mapping[int, tuple[int, int, int]], path,
              shade: bool = True) -> None:
    """Binary P6 pixmap, row-major, top row first."""
    img = raster_rgb(raster, palette, shade)
    header = f"P6\n{raster.spec.cols} {raster.spec.rows}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(img).tobytes())


def _raster_summary(raster: planes.Raster) -> dict:
    counts = {name: int((raster.class_codes == code).sum())
              for name, code in (("basin", planes.BASIN), ("prepole", planes.PREPOLE),
                                 ("unresolved", planes.UNRESOLVED))}
    comps, largest = planes.component_count(raster, planes.BASIN)
    out = {"pixels": int(raster.class_codes.size), "counts": counts,
           "basin_components": comps, "largest_basin_fraction": largest,
           "max_iterations_used": int(raster.iter_counts.max())}
    if raster.cantor_flags is not None:
        out["cantor_flagged"] = int(raster.cantor_flags.sum())
    return out


def _raster_csv(raster: planes.Raster) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im", "class", "iterations", "period"]
               + (["cantor"] if raster.cantor_flags is not None else []))
    pts = raster.spec.points()
    for r in range(raster.spec.rows):
        for c in range(raster.spec.cols):
            row = [r, c, repr(float(pts[r, c].real)), repr(float(pts[r, c].imag)),
                   int(raster.class_codes[r, c]), int(raster.iter_counts[r, c]),
                   int(raster.periods[r, c])]
            if raster.cantor_flags is not None:
                row.append(int(raster.cantor_flags[r, c]))
            w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Command handlers: each returns (exit_code, text)
# ---------------------------------------------------------------------------

def _cmd_orbit(cmd: Command):
    f = cmd.flags
    res = orbit.iterate_orbit(f["lambda"], f["z0"], f["max-iter"], keep_trajectory=True)
    code = EXIT_UNRESOLVED if res.status is orbit.OrbitStatus.UNRESOLVED else EXIT_OK
    if f["format"] == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "re", "im", "status"])
        w.writerows(_orbit_rows(res))
        return code, buf.getvalue()
    if f["format"] == "json":
        body = {"config": cmd.echo(), "status": res.status.value, "steps_used": res.steps_used,
                "period": res.period, "pole_index": res.pole_index,
                "multiplier": _num(res.cycle.multiplier) if res.cycle else None,
                "trajectory": [dict(zip(("step", "re", "im", "status"), r))
                               for r in _orbit_rows(res)]}
        return code, _json(body)
    lines = [f"status: {_status_text(res)}", f"steps: {res.steps_used}"]
    if res.cycle:
        lines += [f"cycle: {', '.join(format_complex(p) for p in res.cycle.points)}",
                  f"multiplier: {format_complex(res.cycle.multiplier)}"]
    return code, "\n".join(lines)


def _cmd_cycle(cmd: Command):
    f = cmd.flags
    res = orbit.iterate_orbit(f["lambda"], f["z0"], f["max-iter"])
    if not res.converged:
        body = {"config": cmd.echo(), "status": res.status.value}
        text = _json(body) if f["format"] == "json" else f"status: {_status_text(res)}"
        return EXIT_UNRESOLVED, text
    try:
        info = orbit.refine_cycle(f["lambda"], res.cycle)
    except NonConvergence as exc:
        body = {"config": cmd.echo(), "status": "non-convergence", "message": str(exc)}
        return EXIT_UNRESOLVED, _json(body) if f["format"] == "json" else f"status: non-convergence ({exc})"
    cls = orbit.classify_cycle(info)
    if f["format"] == "json":
        body = {"config": cmd.echo(), "status": "converged", "period": info.period,
                "points": [_num(p) for p in info.points], "multiplier": _num(info.multiplier),
                "class": cls.kind.value, "p": cls.p, "q": cls.q}
        return EXIT_OK, _json(body)
    kind = cls.kind.value + (f" ({cls.p}/{cls.q})" if cls.q else "")
    lines = [f"period: {info.period}",
             f"points: {', '.join(format_complex(p) for p in info.points)}",
             f"multiplier: {format_complex(info.multiplier)} (|m| = {abs(info.multiplier):.6e})",
             f"class: {kind}"]
    return EXIT_OK, "\n".join(lines)


def _cmd_fixed_points(cmd: Command):
    f = cmd.flags
    lam = f["lambda"].real
    roots = orbit.real_fixed_points_principal(lam)
    if f["format"] == "json":
        return EXIT_OK, _json({"config": cmd.echo(), "count": len(roots), "roots": roots})
    return EXIT_OK, "\n".join([f"count: {len(roots)}"] + [f"root: {r!r}" for r in roots])


def _cmd_tangency(cmd: Command):
    lam_star, x_star = orbit.tangency_point()
    if cmd.flags["format"] == "json":
        return EXIT_OK, _json({"config": cmd.echo(), "lambda_star": lam_star, "x_star": x_star})
    return EXIT_OK, f"lambda*: {lam_star!r}\nx*: {x_star!r}"


def _cmd_itinerary(cmd: Command):
    f = cmd.flags
    word = symbolic.itinerary(f["lambda"], f["z0"], f["length"])
    if f["format"] == "json":
        return EXIT_OK, _json({"config": cmd.echo(), "word": str(word),
                               "terminated": word.terminated})
    return EXIT_OK, f"word: {word}"


def _cmd_cylinder(cmd: Command):
    f = cmd.flags
    cyl = symbolic.cylinder_point(f["lambda"], f["word"])
    back = symbolic.itinerary(f["lambda"], cyl.representative_hp, len(cyl.word) + 1)
    if f["format"] == "json":
        return EXIT_OK, _json({"config": cmd.echo(), "word": str(cyl.word),
                               "representative": _num(cyl.representative),
                               "diameter_estimate": cyl.diameter_estimate,
                               "reencoded": str(back)})
    return EXIT_OK, "\n".join([f"word: {cyl.word}",
                               f"representative: {format_complex(cyl.representative)}",
                               f"diameter: {cyl.diameter_estimate:.6e}",
                               f"re-encoded: {back}"])


def _emit_raster(cmd: Command, raster: planes.Raster, palette):
    f = cmd.flags
    summary = _raster_summary(raster)
    code = EXIT_OK if summary["counts"]["unresolved"] == 0 else EXIT_UNRESOLVED
    if f["format"] == "ppm":
        write_ppm(raster, palette, f["out"])
        return code, _json({"config": cmd.echo(), **summary})
    text = _raster_csv(raster) if f["format"] == "csv" else _json({"config": cmd.echo(), **summary})
    if f["out"]:
        with open(f["out"], "w", newline="") as fh:
            fh.write(text)
        return code, _json({"config": cmd.echo(), **summary})
    return code, text


def _cmd_render_dyn(cmd: Command):
    f = cmd.flags
    raster = planes.render_dynamical(f["lambda"], f["grid"], max_iter=f["max-iter"])
    return _emit_raster(cmd, raster, DEFAULT_PALETTE)


def _cmd_render_param(cmd: Command):
    f = cmd.flags
    raster = planes.render_parameter(f["grid"], max_iter=f["max-iter"])
    return _emit_raster(cmd, raster, PARAMETER_PALETTE)


def _cmd_threshold(cmd: Command):
    f = cmd.flags
    scan = planes.scan_region_threshold(f["quadrant"], f["bound"], f["step"])
    if f["format"] == "json":
        return EXIT_OK, _json({"config": cmd.echo(), "threshold": scan.threshold,
                               "levels_passed": int(scan.passed.sum()),
                               "levels": int(scan.levels.size)})
    return EXIT_OK, f"T_est: {scan.threshold!r}\nlevels passed: {int(scan.passed.sum())}/{scan.levels.size}"


def _cmd_verify(cmd: Command):
    results = verify.run_suites(cmd.flags["suite"])
    code = EXIT_OK if all(r.passed for r in results) else EXIT_UNRESOLVED
    if cmd.flags["format"] == "json":
        return code, _json({"config": cmd.echo(),
                            "suites": [{"name": r.name, "passed": r.passed, "checked": r.checked,
                                        "failures": r.failures, "worst": r.worst,
                                        "tolerance": r.tolerance, "note": r.note}
                                       for r in results]})
    return code, "\n".join(r.line() for r in results)


HANDLERS = {
    "orbit": _cmd_orbit, "cycle": _cmd_cycle, "fixed-points": _cmd_fixed_points,
    "tangency": _cmd_tangency, "itinerary": _cmd_itinerary, "cylinder": _cmd_cylinder,
    "render-dyn": _cmd_render_dyn, "render-param": _cmd_render_param,
    "threshold": _cmd_threshold, "verify": _cmd_verify,
}


def run(cmd: Command, out=None) -> int:
    out = out or sys.stdout
    try:
        code, text = HANDLERS[cmd.name](cmd)
    except OSError as exc:
        print(f"tanlab {cmd.name}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TanlabError as exc:
        print(f"tanlab {cmd.name}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVED
    out.write(text if text.endswith("\n") else text + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cmd)


if __name__ == "__main__":
    sys.exit(main())
