"""Command-line front end: ``nclass <subcommand> [--flags]``.

Subcommands: state-info, witness-scan, nfp-grid, fig2, verify-filter.
Settings come from an optional key=value file (``--config``) overridden by
flags. Output is CSV (header line, 12 significant digits, trailing
``summary`` rows) or a JSON envelope echoing the config and tool version.
Exit codes: 0 ok, 2 config error, 3 numerical rejection.
"""

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .errors import AccuracyError, ConfigError, DomainError, RangeError, SymmetryError, TruncationError
from .filters import (
    GridConfig,
    witness_filter_family,
    disc_family,
    gaussian_witness,
    reference_family,
    verify_filter_conditions,
    witness_from_family,
)
from .fock import make_coherent, make_fock, make_spats, make_thermal, make_vacuum, photon_statistics, wigner_grid
from .nfp import nfp_grid
from .witness import first_order_char_test, mandel_q, min_quadrature_variance, scan_width

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
FIG2_NBARS = (0.8, 1.0, 1.2)
FAMILIES = ("disc", "disc-normalized", "reference", "witness-disc", "witness-gaussian")


@dataclass
class RunConfig:
    state: str = "spats"
    nbar: float = 0.8
    eta: float = 0.5
    dim: int = 128
    w: float = 1.0
    w_min: float = 0.5
    w_max: float = 6.0
    w_step: float = 0.1
    w_list: str = "1,1.5,2,4"
    alpha_re: float = 0.0
    alpha_im: float = 0.0
    grid: str = "3:13"
    family: str = "disc-normalized"
    radial: int = 128
    angular: int = 256
    out: str = ""
    format: str = "csv"

    @property
    def alpha(self):
        return complex(self.alpha_re, self.alpha_im)

    def w_grid(self):
        n = int(math.floor((self.w_max - self.w_min) / self.w_step + 1e-9)) + 1
        return [round(self.w_min + i * self.w_step, 12) for i in range(n)]

    def widths(self):
        try:
            return [float(x) for x in self.w_list.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"w_list: cannot parse {self.w_list!r} as comma-separated numbers")

    def grid_config(self):
        try:
            extent, points = self.grid.split(":")
            cfg = GridConfig(float(extent), int(points))
        except ValueError:
            raise ConfigError(f"grid: expected EXTENT:POINTS, got {self.grid!r}")
        if not (cfg.extent > 0 and cfg.points >= 2):
            raise ConfigError("grid: extent must be positive and points >= 2")
        return cfg


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str, float: float, int: int, str: str}


def _cast(key, raw, where):
    cast = _CASTS[_TYPES[key]]
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"{where}: field {key!r} expects {cast.__name__}, got {raw!r}")


def read_config_file(path):
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown field {key!r}")
        values[key] = _cast(key, raw, f"{path}:{lineno}")
    return values


def validate(cfg):
    if cfg.dim < 2:
        raise ConfigError("dim must be >= 2")
    if not 0.0 <= cfg.eta <= 1.0:
        raise ConfigError("eta must lie in [0, 1]")
    if cfg.nbar < 0:
        raise ConfigError("nbar must be >= 0")
    if cfg.w <= 0:
        raise ConfigError("w must be positive")
    if not (0 < cfg.w_min <= cfg.w_max and cfg.w_step > 0):
        raise ConfigError("need 0 < w_min <= w_max and w_step > 0")
    if cfg.family not in FAMILIES:
        raise ConfigError(f"family must be one of {', '.join(FAMILIES)}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg.radial < 4 or cfg.angular < 8:
        raise ConfigError("radial must be >= 4 and angular >= 8")
    if any(w <= 0 for w in cfg.widths()):
        raise ConfigError("w_list entries must be positive")
    cfg.grid_config()
    parse_state(cfg.state, cfg, build=False)
    return cfg


def parse_state(spec, cfg, build=True):
    """vacuum | coherent:<complex> | thermal[:nbar] | fock:<n> | spats[:nbar,eta]."""
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "vacuum":
            make = lambda: make_vacuum(cfg.dim)
        elif kind == "coherent":
            alpha = complex(arg.replace(" ", "")) if arg else 1.0
            make = lambda: make_coherent(alpha, cfg.dim)
        elif kind == "thermal":
            nbar = float(arg) if arg else cfg.nbar
            make = lambda: make_thermal(nbar, cfg.dim)
        elif kind == "fock":
            n = int(arg)
            if not 0 <= n < cfg.dim:
                raise ConfigError(f"state: Fock number {n} outside [0, dim)")
            make = lambda: make_fock(n, cfg.dim)
        elif kind == "spats":
            nbar, eta = (float(x) for x in arg.split(",")) if arg else (cfg.nbar, cfg.eta)
            make = lambda: make_spats(nbar, eta, cfg.dim)
        else:
            raise ConfigError(f"state: unknown kind {kind!r}")
    except ValueError:
        raise ConfigError(f"state: cannot parse {spec!r}")
    return make() if build else None


# --- output -----------------------------------------------------------------------


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.12g" % x
    if x is None:
        return ""
    return str(x)


def _jsonable(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float("%.12g" % x) if math.isfinite(x) else None
    return x


@dataclass
class Table:
    columns: list
    rows: list
    summary: list  # (key, value) pairs


def render(table, cfg, command):
    if cfg.format == "json":
        env = {
            "tool": "nclass",
            "version": __version__,
            "command": command,
            "config": {k: v for k, v in asdict(cfg).items() if k != "out"},
            "columns": table.columns,
            "rows": [[_jsonable(v) for v in row] for row in table.rows],
            "summary": {k: _jsonable(v) for k, v in table.summary},
        }
        return json.dumps(env, indent=1, sort_keys=True) + "\n"
    lines = [",".join(table.columns)]
    lines += [",".join(fmt(v) for v in row) for row in table.rows]
    if table.summary:
        lines.append("summary," + ",".join(f"{k}={fmt(v)}" for k, v in table.summary))
    return "\n".join(lines) + "\n"


# --- subcommands --------------------------------------------------------------------


def cmd_state_info(cfg):
    rho = parse_state(cfg.state, cfg)
    stats = photon_statistics(rho)
    rows = [("dim", rho.dim), ("tail_mass", stats.tail_mass), ("mean_n", stats.mean())]
    try:
        rows.append(("mandel_q", mandel_q(rho)))
    except DomainError:
        rows.append(("mandel_q", "undefined"))
    var, phase = min_quadrature_variance(rho)
    rows += [("quadrature_variance_min", var), ("quadrature_variance_phase", phase)]
    top, witnessed = first_order_char_test(rho)
    rows += [("char_max_modulus", top), ("char_witnessed", witnessed)]
    alphas = cfg.grid_config().alphas()
    wig = wigner_grid(rho, alphas)
    i = np.unravel_index(int(np.argmin(wig)), wig.shape)
    rows += [("wigner_min", float(wig[i])), ("wigner_argmin_re", alphas[i].real), ("wigner_argmin_im", alphas[i].imag)]
    p = stats.probs
    last = max(int(np.nonzero(p > 1e-12)[0][-1]) if np.any(p > 1e-12) else 0, 0)
    rows += [(f"p_{n}", float(p[n])) for n in range(last + 1)]
    return Table(["quantity", "value"], [list(r) for r in rows], [])


def cmd_witness_scan(cfg):
    rho = parse_state(cfg.state, cfg)
    res = scan_width(rho, cfg.alpha, cfg.w_grid())
    rows = [[w, r.value, r.truncation_bound, r.certified] for w, r in res.rows]
    w_min, v_min = res.minimum
    summary = [("detected", res.detected), ("w_star", res.w_star), ("w_at_min", w_min), ("min_value", v_min)]
    return Table(["w", "value", "truncation_bound", "certified"], rows, summary)


def cmd_fig2(cfg):
    ws = cfg.w_grid()
    columns = ["w"]
    series = []
    summary = []
    for nbar in FIG2_NBARS:
        res = scan_width(make_spats(nbar, 0.5, cfg.dim), 0j, ws)
        series.append(res.values)
        columns.append(f"nbar_{nbar:g}")
        w_min, v_min = res.minimum
        summary += [
            (f"detected_{nbar:g}", res.detected),
            (f"w_star_{nbar:g}", res.w_star),
            (f"min_value_{nbar:g}", v_min),
            (f"w_at_min_{nbar:g}", w_min),
        ]
    rows = [[w] + [float(s[i]) for s in series] for i, w in enumerate(ws)]
    return Table(columns, rows, summary)


def _family(name):
    if name == "disc":
        return disc_family()
    if name == "disc-normalized":
        return disc_family(normalized=True)
    if name == "reference":
        return reference_family()
    if name == "witness-disc":
        return witness_filter_family(witness_from_family(disc_family()))
    return witness_filter_family(gaussian_witness())


def cmd_nfp_grid(cfg):
    from .quadrature import QuadConfig

    rho = parse_state(cfg.state, cfg)
    grid = nfp_grid(rho, cfg.w, cfg.grid_config(), _family(cfg.family), QuadConfig(cfg.radial, cfg.angular))
    rows = [[a.real, a.imag, v] for a, v in zip(grid.alphas.ravel(), grid.values.ravel())]
    arg = grid.argmin
    summary = [("min", grid.minimum), ("argmin_re", arg.real), ("argmin_im", arg.imag)]
    return Table(["re_alpha", "im_alpha", "value"], rows, summary)


def cmd_verify_filter(cfg):
    report = verify_filter_conditions(_family(cfg.family), cfg.widths(), cfg.grid_config())
    rows = [
        [c.w, c.c1_pass, c.c1_decay_slope, c.c2_min, c.c2_pass, c.value_at_zero.real, c.c3_pass, c.passed]
        for c in report.conditions
    ]
    columns = ["w", "c1_pass", "c1_decay_slope", "c2_min", "c2_pass", "value_at_zero", "c3_pass", "passed"]
    return Table(columns, rows, [("family", report.family), ("passed", report.passed)])


COMMANDS = {
    "state-info": cmd_state_info,
    "witness-scan": cmd_witness_scan,
    "nfp-grid": cmd_nfp_grid,
    "fig2": cmd_fig2,
    "verify-filter": cmd_verify_filter,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="nclass", description="Universal nonclassicality witness toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value settings file; flags override it")
        p.add_argument("--state", help="vacuum | coherent:<complex> | thermal[:nbar] | fock:<n> | spats[:nbar,eta]")
        p.add_argument("--nbar", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--dim", type=int)
        p.add_argument("--w", type=float)
        p.add_argument("--w-min", type=float)
        p.add_argument("--w-max", type=float)
        p.add_argument("--w-step", type=float)
        p.add_argument("--w-list", help="comma-separated widths (verify-filter)")
        p.add_argument("--alpha-re", type=float)
        p.add_argument("--alpha-im", type=float)
        p.add_argument("--grid", help="EXTENT:POINTS square grid of alphas")
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--radial", type=int)
        p.add_argument("--angular", type=int)
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def load_config(args):
    values = read_config_file(args.config) if args.config else {}
    for key in _TYPES:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return validate(RunConfig(**values))


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        table = COMMANDS[args.command](cfg)
    except (ConfigError, DomainError) as exc:
        print(f"nclass: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, AccuracyError, SymmetryError, RangeError) as exc:
        print(f"nclass: numerical rejection: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = render(table, cfg, args.command)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
