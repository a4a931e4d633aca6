"""Command-line front end: ``cadselect {check,select,castaing,interchange,oracle}``.

Exit codes: 0 success / all checks pass, 2 a check failed, 3 a selection
was infeasible, 4 bad input (unreadable or invalid spec, bad flags).

The environment variable ``CADSELECT_THREADS`` caps parallelism. All
computations are serial, so every admissible value produces identical
output.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import CadselectError, EmptyValue, ParseError, SelectionInfeasible
from .integral import integrand_grid, verify_interchange
from .io import family_manifest, parse_integrand, parse_mapping, path_csv, write_text
from .mappings import TimeGrid
from .oracle import grid_distance
from .regularity import ProbeCatalog, check_regularity
from .selection import (
    castaing_family,
    castaing_targets,
    epsilon_selection,
    michael_selection,
    projection_selection,
)

EXIT_OK, EXIT_CHECK_FAIL, EXIT_INFEASIBLE, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    spec: str
    grid: int = 1000
    tol_geom: float = 1e-9
    tol_sel: float = 1e-6
    tol_proj: float = 1e-6
    tol_int: float = 1e-3
    seed: int = 0
    probes: ProbeCatalog = field(default_factory=ProbeCatalog)
    out: str = "."
    method: str = "michael"
    point: tuple = ()
    eps: float = 0.1
    levels: int = 6
    step: float = 1e-3
    threads: int = 1

    def validate(self):
        for name in ("tol_geom", "tol_sel", "tol_proj", "tol_int", "eps", "step"):
            if not getattr(self, name) > 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        if self.grid < 1 or self.levels < 1:
            raise InputError("--grid and --levels must be at least 1")


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _probes(text):
    try:
        return ProbeCatalog.parse(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="mapping spec (YAML); integrand spec for 'interchange'")
    common.add_argument("--grid", type=int, default=1000, metavar="N", help="uniform grid cells (default 1000)")
    common.add_argument("--tol-geom", type=float, default=1e-9, help="geometry tolerance (default 1e-9)")
    common.add_argument("--tol-sel", type=float, default=1e-6, help="selection stop tolerance (default 1e-6)")
    common.add_argument("--tol-proj", type=float, default=1e-6, help="left-limit law tolerance (default 1e-6)")
    common.add_argument("--tol-int", type=float, default=1e-3, help="interchange tolerance (default 1e-3)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled probe points (default 0)")
    common.add_argument("--probes", type=_probes, default=ProbeCatalog(),
                        help="probe catalog, e.g. 'step=0.25,margin=1,radii=0.25:0.5:1:2'")
    common.add_argument("--out", default=".", help="output directory (default: current)")

    p = _Parser(prog="cadselect", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="regularity report (report.json)")
    s = sub.add_parser("select", parents=[common], help="one cadlag selection (selection.csv)")
    s.add_argument("--method", choices=("michael", "projection", "epsilon"), default="michael")
    s.add_argument("--point", type=_floats, default=None, help="reference point x for --method projection")
    s.add_argument("--eps", type=float, default=0.1, help="fattening radius for --method epsilon")
    c = sub.add_parser("castaing", parents=[common], help="dense family (member_*.csv, manifest.csv)")
    c.add_argument("--levels", type=int, default=6, help="finest target level K (radius 2^-K)")
    i = sub.add_parser("interchange", parents=[common], help="interchange report (interchange.json, profile.csv)")
    i.add_argument("--levels", type=int, default=3, help="target levels for the candidate family")
    o = sub.add_parser("oracle", parents=[common], help="brute-force distances (oracle.csv)")
    o.add_argument("--point", type=_floats, required=True, help="point x")
    o.add_argument("--step", type=float, default=1e-3, help="dense grid step (default 1e-3)")
    return p


def _threads():
    raw = os.environ.get("CADSELECT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"CADSELECT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError("CADSELECT_THREADS must be at least 1")
    return n


def _config(args):
    cfg = RunConfig(args.subcommand, args.spec, args.grid, args.tol_geom, args.tol_sel, args.tol_proj,
                    args.tol_int, args.seed, args.probes, args.out)
    for name in ("method", "eps", "levels", "step"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "point", None) is not None:
        cfg.point = args.point
    cfg.threads = _threads()
    cfg.validate()
    return cfg


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _mapping(cfg):
    return parse_mapping(_read(cfg.spec))


def _grid(cfg, mapping):
    if cfg.grid < len(mapping.breakpoints) - 1:
        raise InputError("--grid must be at least the number of breakpoints")
    return TimeGrid.for_mapping(mapping, cfg.grid)


def _report(cfg, mapping, grid):
    return check_regularity(mapping, grid, cfg.probes, cfg.seed, tol_geom=cfg.tol_geom)


def _point(cfg, dim):
    x = np.zeros(dim) if not cfg.point else np.asarray(cfg.point, float)
    if x.shape != (dim,):
        raise InputError(f"--point needs {dim} coordinates")
    return x


def run(cfg):
    """Execute one subcommand; returns the exit code."""
    os.makedirs(cfg.out, exist_ok=True)
    out = lambda name: os.path.join(cfg.out, name)  # noqa: E731

    if cfg.subcommand == "interchange":
        h, mu = parse_integrand(_read(cfg.spec), os.path.dirname(os.path.abspath(cfg.spec)))
        S = h.domain
        grid = integrand_grid(h, mu, cfg.grid)
        report = _report(cfg, S, grid)
        family = [projection_selection(S, np.zeros(S.dimension), grid)]
        if report.passed:
            targets = castaing_targets(S, grid, cfg.levels, d1=report.d1)
            family += [m.path for m in castaing_family(S, targets, cfg.tol_sel, report, grid)]
        res = verify_interchange(h, mu, family, grid, cfg.tol_int)
        write_text(out("interchange.json"), res.to_text())
        write_text(out("profile.csv"), res.profile_csv())
        sys.stdout.write(res.to_text())
        return EXIT_OK if res.passed in (True, None) else EXIT_CHECK_FAIL

    mapping = _mapping(cfg)
    grid = _grid(cfg, mapping)

    if cfg.subcommand == "check":
        report = _report(cfg, mapping, grid)
        write_text(out("report.json"), report.to_text())
        sys.stdout.write(report.to_text())
        return EXIT_OK if report.passed else EXIT_CHECK_FAIL

    if cfg.subcommand == "select":
        if cfg.method == "projection":
            path = projection_selection(mapping, _point(cfg, mapping.dimension), grid)
        else:
            report = _report(cfg, mapping, grid)
            if cfg.method == "michael":
                path = michael_selection(mapping, cfg.tol_sel, report, grid)
            else:
                if not (report.isc.passed and report.vec_domain.passed):
                    raise SelectionInfeasible("regularity checks did not pass")
                path = epsilon_selection(mapping, cfg.eps, report.d1, grid)
        write_text(out("selection.csv"), path_csv(path, mapping))
        return EXIT_OK

    if cfg.subcommand == "castaing":
        report = _report(cfg, mapping, grid)
        targets = castaing_targets(mapping, grid, cfg.levels, d1=report.d1)
        family = castaing_family(mapping, targets, cfg.tol_sel, report, grid)
        entries = []
        for i, member in enumerate(family):
            name = f"member_{i:05d}.csv"
            write_text(out(name), path_csv(member.path, mapping))
            entries.append((name, member))
        write_text(out("manifest.csv"), family_manifest(entries))
        return EXIT_OK

    if cfg.subcommand == "oracle":
        x = _point(cfg, mapping.dimension)
        lines = ["t,distance"]
        for t in grid.times:
            lines.append(f"{t:.17g},{grid_distance(mapping.value(t), x, cfg.step):.17g}")
        write_text(out("oracle.csv"), "\n".join(lines) + "\n")
        return EXIT_OK
    raise InputError(f"unknown subcommand {cfg.subcommand!r}")


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return run(cfg)
    except (InputError, ParseError) as exc:
        print(f"cadselect: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SelectionInfeasible as exc:
        where = "" if exc.t is None else f" (t={exc.t})"
        print(f"cadselect: infeasible: {exc}{where}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except EmptyValue as exc:
        print(f"cadselect: input error: empty value: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CadselectError as exc:
        print(f"cadselect: error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
