"""Command-line front end: evaluate states on grids and write plot-ready files.

State description files are line oriented: blank lines and lines starting
with ``#`` are skipped, every other line is ``key value...``. Examples::

    kind coherent          kind squeezed            kind mixture
    spins 5                spins 5                  spins 5
    theta 1.5707963        beta 0.2 0.0             component 0.5 coherent 0 0
    phi 0.0                base_theta 0.0           component 0.5 coherent 3.141592653589793 0

    kind raw               kind operator            kind fock
    spins 1                spins 2                  spins 5
    amp 0.7071067812 0     row 0,0 0,0 0,0 0,0      excitations 2
    amp 0.7071067812 0     row ...                  (...)

``raw`` lists one ``amp re im`` line per basis index, ascending. ``operator``
lists one ``row`` line per matrix row with comma-joined re,im pairs; it is
the only kind that may describe a non-density operator.

Grids are given as ``--grid "name:lo:hi:samples,..."`` with axis names
x1,x2,x3 (volume), theta,phi (sphere) or two of q1,p1,q2,p2 (plane4d).
Output files are comma separated with a ``#`` commented header recording
the state, grid and library version; they contain no timing information and
are byte-identical across repeated runs.

Exit codes: 0 ok, 1 validation failure, 2 numeric failure, 3 capacity.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import CapacityError, NumericError, SpinWignerError, ValidationError
from .moyal import wigner_complex_many
from .omega_map import OscillatorDensity, construct_omega, push_density, push_operator
from .reduced_space import check_fiber_invariance, reduced_wigner_many
from .spin_core import decompose_angular_basis
from .sphere import LmDensity, SphPoint, sphere_normalization, ws_analytic, ws_numeric_many
from .states import StateSpec, realize_operator

_MAX_GRID_POINTS = 1_000_000
_CHUNK = 8192
_DEFAULT_TOLERANCES = {"norm": 1e-8, "fiber": 1e-6, "trace": 1e-9}

_AXIS_NAMES = {
    "volume": ("x1", "x2", "x3"),
    "sphere": ("theta", "phi"),
}
_PLANE_AXES = ("q1", "p1", "q2", "p2")


@dataclass(frozen=True)
class GridAxis:
    name: str
    lo: float
    hi: float
    samples: int

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.samples)

    def describe(self) -> str:
        return f"{self.name}:{self.lo:g}:{self.hi:g}:{self.samples}"


@dataclass(frozen=True)
class GridSpec:
    """Sampling description for volume, sphere or plane4d evaluation."""

    kind: str
    axes: tuple[GridAxis, ...]
    fixed: tuple[tuple[str, float], ...] = ()

    def describe(self) -> str:
        out = f"{self.kind} " + ",".join(a.describe() for a in self.axes)
        if self.fixed:
            out += " fixed " + ",".join(f"{k}={v:g}" for k, v in self.fixed)
        return out

    def total_points(self) -> int:
        total = 1
        for a in self.axes:
            total *= a.samples
        return total


@dataclass
class EvalReport:
    """Run summary printed to stdout (never into data files)."""

    represented_trace: float
    commutes_with_s2: bool
    normalization_check: float
    timing_ms: float
    fiber_deviation: float | None = None
    notes: tuple[str, ...] = field(default=())

    def lines(self):
        yield f"represented_trace={self.represented_trace:.12e}"
        yield f"commutes_with_s2={'true' if self.commutes_with_s2 else 'false'}"
        yield f"normalization_check={self.normalization_check:.12e}"
        if self.fiber_deviation is not None:
            yield f"fiber_deviation={self.fiber_deviation:.12e}"
        yield f"timing_ms={self.timing_ms:.3f}"
        for note in self.notes:
            yield f"note={note}"


def parse_grid(kind: str, text: str, fixed_text: str | None = None) -> GridSpec:
    axes = []
    for part in text.split(","):
        pieces = part.strip().split(":")
        if len(pieces) != 4:
            raise ValidationError(f"grid axis {part!r} is not name:lo:hi:samples")
        name, lo_s, hi_s, n_s = pieces
        try:
            lo, hi, samples = float(lo_s), float(hi_s), int(n_s)
        except ValueError as exc:
            raise ValidationError(f"grid axis {part!r}: {exc}") from exc
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise ValidationError(f"grid axis {name!r} needs finite bounds with lo < hi")
        if samples < 2:
            raise ValidationError(f"grid axis {name!r} needs at least 2 samples")
        axes.append(GridAxis(name.strip(), lo, hi, samples))

    names = tuple(a.name for a in axes)
    fixed: tuple[tuple[str, float], ...] = ()
    if kind in _AXIS_NAMES:
        if names != _AXIS_NAMES[kind]:
            raise ValidationError(
                f"{kind} grid needs axes {','.join(_AXIS_NAMES[kind])} in order, got {','.join(names)}"
            )
        if fixed_text:
            raise ValidationError("--fix applies only to plane4d grids")
    elif kind == "plane4d":
        if len(names) != 2 or len(set(names)) != 2 or not set(names) <= set(_PLANE_AXES):
            raise ValidationError(
                f"plane4d grid needs two distinct axes among {','.join(_PLANE_AXES)}"
            )
        remaining = {name: 0.0 for name in _PLANE_AXES if name not in names}
        if fixed_text:
            for item in fixed_text.split(","):
                key, _, val = item.partition("=")
                key = key.strip()
                if key not in remaining:
                    raise ValidationError(f"--fix names {key!r}, which is not a free coordinate")
                try:
                    remaining[key] = float(val)
                except ValueError as exc:
                    raise ValidationError(f"--fix value for {key!r}: {exc}") from exc
        fixed = tuple(sorted(remaining.items()))
    else:
        raise ValidationError(f"unknown grid kind {kind!r}")

    spec = GridSpec(kind, tuple(axes), fixed)
    if spec.total_points() > _MAX_GRID_POINTS:
        raise CapacityError(
            f"grid has {spec.total_points()} points, above the {_MAX_GRID_POINTS} budget"
        )
    return spec


def _parse_complex_pair(re_s: str, im_s: str, where: str) -> complex:
    try:
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _parse_component(tokens: list[str], n: int, where: str) -> tuple[float, StateSpec]:
    if len(tokens) < 2:
        raise ValidationError(f"{where}: need weight and kind")
    try:
        weight = float(tokens[0])
    except ValueError as exc:
        raise ValidationError(f"{where}: weight {tokens[0]!r}: {exc}") from exc
    kind, rest = tokens[1], tokens[2:]
    if kind == "fock":
        if len(rest) != 1:
            raise ValidationError(f"{where}: fock takes one excitation count")
        return weight, StateSpec("fock", n, excitations=int(rest[0]))
    if kind == "coherent":
        if len(rest) != 2:
            raise ValidationError(f"{where}: coherent takes theta and phi")
        return weight, StateSpec("coherent", n, theta=float(rest[0]), phi=float(rest[1]))
    if kind == "cat":
        if rest:
            raise ValidationError(f"{where}: cat takes no parameters")
        return weight, StateSpec("cat", n)
    if kind == "raw":
        amps = []
        for tok in rest:
            re_s, _, im_s = tok.partition(",")
            amps.append(_parse_complex_pair(re_s, im_s, where))
        return weight, StateSpec("raw", n, amplitudes=tuple(amps))
    raise ValidationError(f"{where}: unsupported component kind {kind!r}")


def parse_state_text(text: str) -> StateSpec:
    """Parse the line-oriented state description format."""
    entries: list[tuple[str, list[str]]] = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        entries.append((tokens[0], tokens[1:]))

    scalars = {key: vals for key, vals in entries if key not in ("amp", "row", "component")}
    if "kind" not in scalars or "spins" not in scalars:
        raise ValidationError("state file needs 'kind' and 'spins' lines")
    kind = scalars["kind"][0]
    try:
        n = int(scalars["spins"][0])
    except ValueError as exc:
        raise ValidationError(f"spins: {exc}") from exc

    def scalar(key: str, default: float | None = None) -> float | None:
        if key not in scalars:
            return default
        try:
            return float(scalars[key][0])
        except ValueError as exc:
            raise ValidationError(f"{key}: {exc}") from exc

    if kind == "fock":
        k = scalar("excitations")
        if k is None:
            raise ValidationError("fock state needs an 'excitations' line")
        return StateSpec("fock", n, excitations=int(k))
    if kind == "coherent":
        theta, phi = scalar("theta"), scalar("phi")
        if theta is None or phi is None:
            raise ValidationError("coherent state needs 'theta' and 'phi' lines")
        return StateSpec("coherent", n, theta=theta, phi=phi)
    if kind == "cat":
        return StateSpec("cat", n)
    if kind == "squeezed":
        if "beta" not in scalars or len(scalars["beta"]) != 2:
            raise ValidationError("squeezed state needs 'beta re im'")
        beta = _parse_complex_pair(scalars["beta"][0], scalars["beta"][1], "beta")
        return StateSpec("squeezed", n, beta=beta,
                         base_theta=scalar("base_theta", 0.0),
                         base_phi=scalar("base_phi", 0.0))
    if kind == "mixture":
        comps = [_parse_component(vals, n, f"component {i + 1}")
                 for i, (key, vals) in enumerate(entries) if key == "component"]
        if not comps:
            raise ValidationError("mixture needs 'component' lines")
        return StateSpec("mixture", n, components=tuple(comps))
    if kind == "raw":
        amps = []
        for key, vals in entries:
            if key != "amp":
                continue
            if len(vals) != 2:
                raise ValidationError("each 'amp' line needs re and im")
            amps.append(_parse_complex_pair(vals[0], vals[1], "amp"))
        if len(amps) != 2**n:
            raise ValidationError(f"raw state needs {2**n} 'amp' lines, got {len(amps)}")
        return StateSpec("raw", n, amplitudes=tuple(amps))
    if kind == "operator":
        rows = []
        for key, vals in entries:
            if key != "row":
                continue
            row = []
            for tok in vals:
                re_s, _, im_s = tok.partition(",")
                row.append(_parse_complex_pair(re_s, im_s, "row"))
            if len(row) != 2**n:
                raise ValidationError(f"each 'row' needs {2**n} re,im pairs, got {len(row)}")
            rows.append(tuple(row))
        if len(rows) != 2**n:
            raise ValidationError(f"operator needs {2**n} 'row' lines, got {len(rows)}")
        return StateSpec("operator", n, matrix=tuple(rows))
    raise ValidationError(f"unknown state kind {kind!r}")


def load_state_spec(path: str) -> StateSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_state_text(fh.read())


def _push_spec(spec: StateSpec) -> tuple[OscillatorDensity, float]:
    """Realize and push a spec; returns the pushed operator and input trace."""
    op = realize_operator(spec)
    omega = construct_omega(decompose_angular_basis(spec.n))
    if spec.kind == "operator":
        return push_operator(omega, op), float(np.trace(op).real)
    return push_density(omega, op), float(np.trace(op).real)


def _chunked(fn, total: int, threads: int) -> np.ndarray:
    """Evaluate fn over index slices; chunking is fixed so results do not
    depend on the thread count."""
    slices = [slice(i, min(i + _CHUNK, total)) for i in range(0, total, _CHUNK)]
    if threads <= 1:
        parts = [fn(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, slices))
    return np.concatenate([np.atleast_1d(p) for p in parts])


def _fmt(v: float) -> str:
    return f"{v:.12e}"


def _write_table(path: str, header: list[str], columns: list[str],
                 rows: list[tuple[float, ...]]) -> None:
    for row in rows:
        for v in row:
            if not math.isfinite(v):
                raise NumericError("refusing to write a non-finite value")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _maybe_normalization(density: OscillatorDensity, notes: list[str]) -> float:
    if not density.commutes_with_s2:
        notes.append("normalization skipped: operator does not commute with total spin squared")
        return math.nan
    if density.represented_trace <= 1e-9:
        notes.append("normalization skipped: represented trace is zero")
        return math.nan
    return sphere_normalization(density)


def cmd_eval_volume(spec: StateSpec, grid: GridSpec, out_path: str,
                    threads: int = 1) -> EvalReport:
    """Evaluate the reduced function on a volume grid and write it out."""
    started = time.perf_counter()
    density, _ = _push_spec(spec)
    if not density.commutes_with_s2:
        raise ValidationError(
            "state does not commute with total spin squared (commutator residual "
            f"{density.s2_residual:.3e}); the three-variable reduction is undefined. "
            "Evaluate a plane4d slice instead."
        )
    g1, g2, g3 = np.meshgrid(*(a.points() for a in grid.axes), indexing="ij")
    x1, x2, x3 = g1.ravel(), g2.ravel(), g3.ravel()
    vals = _chunked(lambda s: reduced_wigner_many(density, x1[s], x2[s], x3[s]),
                    x1.size, threads)
    notes: list[str] = []
    norm = _maybe_normalization(density, notes)
    header = [f"spinwigner {__version__}", f"state: {spec.describe()}",
              f"grid: {grid.describe()}"]
    rows = [(x1[i], x2[i], x3[i], vals[i]) for i in range(x1.size)]
    _write_table(out_path, header, ["x1", "x2", "x3", "value"], rows)
    elapsed = (time.perf_counter() - started) * 1000.0
    return EvalReport(density.represented_trace, density.commutes_with_s2,
                      norm, elapsed, notes=tuple(notes))


def _sphere_values(density: OscillatorDensity, theta: np.ndarray, phi: np.ndarray,
                   method: str, notes: list[str], threads: int):
    numeric = None
    analytic = None
    force = not density.commutes_with_s2
    if force:
        notes.append("numeric route uses the canonical section: operator does not "
                     "commute with total spin squared, values are section-dependent")
    if method in ("numeric", "both") or force:
        numeric = _chunked(
            lambda s: ws_numeric_many(density, theta[s], phi[s], force_section=force),
            theta.size, threads)
    if method in ("analytic", "both") and not force:
        try:
            lm = LmDensity.from_density(density)
            analytic = np.array([ws_analytic(lm, SphPoint(t, p))
                                 for t, p in zip(theta, phi)])
        except ValidationError as exc:
            notes.append(f"analytic route fell back to numeric: {exc}")
            analytic = None
            if numeric is None:
                numeric = _chunked(
                    lambda s: ws_numeric_many(density, theta[s], phi[s]),
                    theta.size, threads)
    elif method in ("analytic", "both") and force:
        notes.append("analytic route fell back to numeric: cross-shell coherences "
                     "have no closed spherical form")
    return numeric, analytic


def cmd_eval_sphere(spec: StateSpec, grid: GridSpec, out_path: str,
                    method: str = "numeric", threads: int = 1) -> EvalReport:
    """Evaluate the spherical function on an angular grid and write it out."""
    if method not in ("analytic", "numeric", "both"):
        raise ValidationError(f"method must be analytic, numeric or both, got {method!r}")
    started = time.perf_counter()
    density, _ = _push_spec(spec)
    gt, gp = np.meshgrid(*(a.points() for a in grid.axes), indexing="ij")
    theta, phi = gt.ravel(), gp.ravel()
    notes: list[str] = []
    numeric, analytic = _sphere_values(density, theta, phi, method, notes, threads)

    header = [f"spinwigner {__version__}", f"state: {spec.describe()}",
              f"grid: {grid.describe()}", f"method: {method}"]
    if method == "both" and analytic is not None:
        columns = ["theta", "phi", "value", "value_numeric", "abs_diff"]
        rows = [(theta[i], phi[i], analytic[i], numeric[i], abs(analytic[i] - numeric[i]))
                for i in range(theta.size)]
    else:
        vals = analytic if analytic is not None else numeric
        columns = ["theta", "phi", "value"]
        rows = [(theta[i], phi[i], vals[i]) for i in range(theta.size)]
    _write_table(out_path, header, columns, rows)

    norm = _maybe_normalization(density, notes)
    elapsed = (time.perf_counter() - started) * 1000.0
    return EvalReport(density.represented_trace, density.commutes_with_s2,
                      norm, elapsed, notes=tuple(notes))


def cmd_eval_plane4d(spec: StateSpec, grid: GridSpec, out_path: str,
                     threads: int = 1) -> EvalReport:
    """Evaluate a two-coordinate slice of the four-dimensional function.

    This is the escape hatch for operators that cannot be reduced to three
    variables; complex values are written as separate re/im columns.
    """
    started = time.perf_counter()
    density, _ = _push_spec(spec)
    ga, gb = np.meshgrid(*(a.points() for a in grid.axes), indexing="ij")
    coords = {name: val * np.ones(ga.size) for name, val in grid.fixed}
    coords[grid.axes[0].name] = ga.ravel()
    coords[grid.axes[1].name] = gb.ravel()
    vals = _chunked(
        lambda s: wigner_complex_many(density, coords["q1"][s], coords["p1"][s],
                                      coords["q2"][s], coords["p2"][s]),
        ga.size, threads)
    notes: list[str] = []
    norm = _maybe_normalization(density, notes)
    header = [f"spinwigner {__version__}", f"state: {spec.describe()}",
              f"grid: {grid.describe()}"]
    a_name, b_name = grid.axes[0].name, grid.axes[1].name
    rows = [(ga.ravel()[i], gb.ravel()[i], vals[i].real, vals[i].imag)
            for i in range(ga.size)]
    _write_table(out_path, header, [a_name, b_name, "value_re", "value_im"], rows)
    elapsed = (time.perf_counter() - started) * 1000.0
    return EvalReport(density.represented_trace, density.commutes_with_s2,
                      norm, elapsed, notes=tuple(notes))


def cmd_check(spec: StateSpec, tolerances: dict[str, float] | None = None,
              samples: int = 100) -> tuple[EvalReport, bool]:
    """Run the consistency checks on one state; returns (report, all-passed)."""
    tol = dict(_DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    started = time.perf_counter()
    density, input_trace = _push_spec(spec)
    notes: list[str] = []
    norm = _maybe_normalization(density, notes)
    fiber = check_fiber_invariance(density, samples)

    ok = density.commutes_with_s2
    if fiber > tol["fiber"]:
        ok = False
        notes.append(f"fiber invariance violated: deviation {fiber:.3e} > {tol['fiber']:.0e}")
    if abs(input_trace - 1.0) <= tol["trace"]:
        if abs(density.represented_trace - 1.0) > tol["trace"]:
            ok = False
            notes.append(
                f"information lost: represented trace {density.represented_trace:.6f} != 1"
            )
    else:
        notes.append(f"input trace {input_trace:.6f} is not 1; trace check skipped")
    if not math.isnan(norm) and abs(norm - 1.0) > tol["norm"]:
        ok = False
        notes.append(f"sphere normalization {norm!r} outside 1 +- {tol['norm']:.0e}")
    if not density.commutes_with_s2:
        notes.append(
            f"operator does not commute with total spin squared "
            f"(residual {density.s2_residual:.3e})"
        )
    elapsed = (time.perf_counter() - started) * 1000.0
    report = EvalReport(density.represented_trace, density.commutes_with_s2,
                        norm, elapsed, fiber_deviation=fiber, notes=tuple(notes))
    return report, ok


def _parse_tolerances(text: str | None) -> dict[str, float]:
    if not text:
        return {}
    out: dict[str, float] = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in _DEFAULT_TOLERANCES:
            raise ValidationError(
                f"unknown tolerance {key!r}; known: {', '.join(sorted(_DEFAULT_TOLERANCES))}"
            )
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise ValidationError(f"tolerance {key!r}: {exc}") from exc
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinwigner",
        description="Evaluate spin Wigner-like functions on grids and write CSV files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_grid=True):
        p.add_argument("--state", required=True, help="state description file")
        if needs_grid:
            p.add_argument("--grid", required=True, help="axis spec name:lo:hi:samples,...")
            p.add_argument("--out", required=True, help="output CSV path")
            p.add_argument("--threads", type=int, default=1, help="evaluation threads")
        p.add_argument("--tolerance", default=None,
                       help="override tolerances, e.g. norm=1e-8,fiber=1e-6,trace=1e-9")

    p_vol = sub.add_parser("volume", help="reduced function on an x1,x2,x3 grid")
    add_common(p_vol)
    p_sph = sub.add_parser("sphere", help="spherical function on a theta,phi grid")
    add_common(p_sph)
    p_sph.add_argument("--method", choices=("analytic", "numeric", "both"),
                       default="numeric")
    p_pl = sub.add_parser("plane4d", help="2D slice of the four-dimensional function")
    add_common(p_pl)
    p_pl.add_argument("--fix", default=None,
                      help="values for the fixed coordinates, e.g. q2=0,p2=0")
    p_chk = sub.add_parser("check", help="normalization / invariance checks")
    add_common(p_chk, needs_grid=False)
    p_chk.add_argument("--samples", type=int, default=100,
                       help="sample count for the fiber-invariance check")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = load_state_spec(args.state)
        if args.command == "check":
            report, ok = cmd_check(spec, _parse_tolerances(args.tolerance),
                                   samples=args.samples)
            for line in report.lines():
                print(line)
            print(f"status={'ok' if ok else 'fail'}")
            return 0 if ok else 1
        grid = parse_grid(args.command, args.grid,
                          getattr(args, "fix", None))
        if args.command == "volume":
            report = cmd_eval_volume(spec, grid, args.out, threads=args.threads)
        elif args.command == "sphere":
            report = cmd_eval_sphere(spec, grid, args.out, method=args.method,
                                     threads=args.threads)
        else:
            report = cmd_eval_plane4d(spec, grid, args.out, threads=args.threads)
        for line in report.lines():
            print(line)
        return 0
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SpinWignerError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
