"""
Command Line Interface for the spectral Boltzmann solver

Subcommands materialize scenarios, compute collision operators (spectral and
direct quadrature), probe the weighting function, advise on the truncation
speed, run time evolutions and reproduce the validation suites.

Exit codes: 0 success, 1 failed validation or run, 2 usage/configuration error.
"""

import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import numpy as np

from . import __version__
from .acceptance import SUITES, run_suites
from .advisor import advise as advise_gtr
from .advisor import contour_table
from .ckernel import CollisionParams, kernel_probe
from .collide import ConservationBasis, collide as collide_field
from .config import RunConfig, config_from_dict, parse_config
from .errors import ConfigError, FieldFileError, SpectralBoltzmannError
from .evolve import EvolutionOptions, run_evolution
from .fieldio import read_field, write_field, write_manifest, write_slice_csv, write_table
from .moments import MOMENT_COLUMNS, higher_moments, moments
from .oracle import SphereRule, q_direct, q_direct_field
from .scenarios import materialize
from .vgrid import RealField, axis_slice

# Set up logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

USAGE_ERROR = 2
RUN_FAILURE = 1
AXES = {"x": 0, "y": 1, "z": 2}


def _fail(message: str, code: int = RUN_FAILURE):
    click.echo(f"❌ Error: {message}", err=True)
    sys.exit(code)


def _parse_params(pairs: Tuple[str, ...]) -> Dict[str, Any]:
    params = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise click.BadParameter(f"expected KEY=VALUE, got '{pair}'", param_hint="--param")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _load_config(config_path: Optional[str], **overrides) -> RunConfig:
    """Config file (if any) with command-line overrides applied on top."""
    base = parse_config(config_path).model_dump(by_alias=True) if config_path else {}
    sections = {
        "L": ("grid", "L"),
        "N": ("grid", "N"),
        "g_tr": ("collision", "g_tr"),
        "btilde": ("collision", "Btilde"),
        "project": ("collision", "project"),
        "scenario": ("scenario", "name"),
        "method": ("advisor", "method"),
        "tol": ("advisor", "tol"),
        "v_target": ("advisor", "v_target"),
    }
    for key, value in overrides.items():
        if value is None or key not in sections:
            continue
        section, field = sections[key]
        base.setdefault(section, {})[field] = value
    if overrides.get("params"):
        base.setdefault("scenario", {}).setdefault("params", {}).update(overrides["params"])
    return config_from_dict(base)


def _set_verbosity(verbose: bool):
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def execution_options(fn):
    """--jobs/--deterministic with environment overrides, plus --verbose."""
    fn = click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')(fn)
    fn = click.option('--deterministic/--relaxed', default=True, envvar='SPECTRAL_BOLTZMANN_DETERMINISTIC',
                      help='Reproducible reductions (default) or reassociated fast ones')(fn)
    fn = click.option('--jobs', '-j', type=click.IntRange(min=1), default=None, envvar='SPECTRAL_BOLTZMANN_JOBS',
                      help='Worker threads (default: all available)')(fn)
    return fn


def model_options(fn):
    """Grid, collision and scenario overrides shared by the run commands."""
    fn = click.option('--param', '-p', 'params', multiple=True, help='Scenario parameter KEY=VALUE (repeatable)')(fn)
    fn = click.option('--scenario', '-s', default=None, help='Scenario name (maxwellian, bkw, cylindrical, mixture, plasma)')(fn)
    fn = click.option('--btilde', type=float, default=None, help='Angular kernel constant (default 1/(4 pi))')(fn)
    fn = click.option('--g-tr', 'g_tr', type=float, default=None, help='Truncation speed')(fn)
    fn = click.option('--N', 'N', type=int, default=None, help='Nodes per dimension (even, >= 8)')(fn)
    fn = click.option('--L', 'L', type=float, default=None, help='Half-width of the velocity cube')(fn)
    fn = click.option('--config', '-c', 'config_path', type=click.Path(exists=True, dir_okay=False), default=None,
                      help='Run configuration (.json or .toml)')(fn)
    return fn


def _write_slices(config: RunConfig, field: RealField, out_dir: Path, stem: str, name: str):
    written = []
    for axis in config.outputs.slices:
        coords, values, fixed = axis_slice(field, AXES[axis])
        path = write_slice_csv(out_dir / f"{stem}_slice_{axis}.csv", coords, values, name=name, axis_name=f"v_{axis}")
        written.append((path, fixed))
    return written


@click.group(invoke_without_command=True)
@click.pass_context
@click.version_option(version=__version__, prog_name='spectral-boltzmann')
def cli(ctx):
    """Spectral-Lagrangian Boltzmann solver for Maxwell molecules

    Computes the truncated collision operator by a weighted Fourier
    convolution and advises on the truncation speed g_tr.
    """
    if ctx.invoked_subcommand is None:
        click.echo("🌀 Spectral Boltzmann Solver")
        click.echo("=" * 40)
        click.echo("Available commands:")
        click.echo("  init          Sample a scenario to a field file")
        click.echo("  collide       Compute the collision operator spectrally")
        click.echo("  oracle        Compute the collision operator by direct quadrature")
        click.echo("  kernel-probe  Dump the weighting function along a ray")
        click.echo("  advise        Fit a Maxwellian envelope and recommend g_tr")
        click.echo("  evolve        Integrate the Boltzmann equation in time")
        click.echo("  validate      Run validation suites")
        click.echo("  info          Show a field file's header and moments")
        click.echo("  api           Launch the HTTP service")
        click.echo()
        click.echo("Use 'spectral-boltzmann COMMAND --help' for more information")


@cli.command()
@click.argument('output', type=click.Path(dir_okay=False))
@model_options
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
def init(output: str, config_path, L, N, g_tr, btilde, scenario, params, verbose: bool):
    """
    Sample a scenario's initial pdf on the grid and write it as a field file.

    OUTPUT: Path of the field file to create
    """
    _set_verbosity(verbose)
    try:
        config = _load_config(config_path, L=L, N=N, g_tr=g_tr, btilde=btilde, scenario=scenario,
                              params=_parse_params(params))
        grid = config.build_grid()
        chosen = config.build_scenario()
        field = materialize(chosen, grid)
        path = write_field(output, field, t=chosen.t0)
        base = moments(field)
        click.echo(f"📦 Scenario: {chosen.name} {chosen.params}")
        click.echo(f"🧮 Grid: L={grid.L:g}, N={grid.N}, dv={grid.dv:.6g}")
        click.echo(f"⚖️  Mass={base.mass:.12g}, energy={base.energy:.12g}")
        click.echo(f"✅ Wrote {path}")
    except ConfigError as e:
        _fail(str(e), USAGE_ERROR)
    except SpectralBoltzmannError as e:
        _fail(str(e))


def _initial_field(config: RunConfig, input_file: Optional[str]) -> Tuple[RealField, float]:
    if input_file:
        record = read_field(input_file)
        if not isinstance(record.field, RealField):
            raise FieldFileError(f"{input_file} holds a spectral field, expected a velocity-space pdf")
        return record.field, record.t
    chosen = config.build_scenario()
    return materialize(chosen, config.build_grid()), chosen.t0


@cli.command()
@model_options
@click.option('--input', '-i', 'input_file', type=click.Path(), default=None,
              help='Field file to use instead of a scenario')
@click.option('--output-dir', '-o', default=None, help='Output directory (default: outputs.directory)')
@click.option('--project/--no-project', default=None, help='Apply the conservation projection')
@execution_options
def collide(config_path, L, N, g_tr, btilde, scenario, params, input_file, output_dir, project,
            jobs, deterministic, verbose):
    """
    Compute Q^NC of a scenario or field file by the weighted Fourier convolution.
    """
    _set_verbosity(verbose)
    try:
        if input_file and not Path(input_file).is_file():
            _fail(f"Field file '{input_file}' not found", USAGE_ERROR)
        config = _load_config(config_path, L=L, N=N, g_tr=g_tr, btilde=btilde, scenario=scenario,
                              params=_parse_params(params), project=project)
        f, t = _initial_field(config, input_file)
        collision = config.collision_params()
        out_dir = Path(output_dir or config.outputs.directory)

        click.echo(f"🧮 Grid: L={f.grid.L:g}, N={f.grid.N}; g_tr={collision.g_tr:g}")
        click.echo("🔄 Computing the weighted convolution...")
        basis = ConservationBasis.build(f.grid) if config.collision.project else None
        result = collide_field(f, collision, basis=basis, jobs=jobs, deterministic=deterministic)

        written = [write_field(out_dir / "q.bspf", result.output, t=t)]
        slices = _write_slices(config, result.output, out_dir, "q", "Q")
        written.extend(path for path, _ in slices)
        written.append(write_manifest(out_dir / "diagnostics.json", {
            "command": "collide",
            "config": config.model_dump(by_alias=True),
            "derived": config.derived(),
            "input": input_file,
            "t": t,
            "jobs": jobs,
            "deterministic": deterministic,
            "slice_fixed_coordinates": {str(p.name): fixed for p, fixed in slices},
            "diagnostics": result.diagnostics(),
        }))

        click.echo(f"📈 |Q|_inf = {result.q.sup_norm():.3e}, imaginary residue = {result.imag_residue:.3e}")
        if result.residue_flagged:
            click.echo("⚠️  Imaginary residue is large; the grid may not resolve the weighting function")
        click.echo(f"✅ Done in {result.wall_time:.1f}s. Created {len(written)} file(s):")
        for path in written:
            click.echo(f"   • {path}")
    except ConfigError as e:
        _fail(str(e), USAGE_ERROR)
    except (FileNotFoundError, FieldFileError) as e:
        _fail(str(e), USAGE_ERROR)
    except SpectralBoltzmannError as e:
        if verbose:
            logger.exception("Detailed error information:")
        _fail(str(e))


@cli.command()
@model_options
@click.option('--output-dir', '-o', default=None, help='Output directory (default: outputs.directory)')
@click.option('--radial-nodes', type=click.IntRange(min=8), default=32, help='Gauss-Legendre nodes in |g|')
@click.option('--polar-order', type=click.IntRange(min=2), default=16, help='Polar points of the sphere rule')
@click.option('--full-grid', is_flag=True, help='Evaluate every node instead of the axis slices')
@execution_options
def oracle(config_path, L, N, g_tr, btilde, scenario, params, output_dir, radial_nodes, polar_order,
           full_grid, jobs, deterministic, verbose):
    """
    Compute the truncated collision operator of an analytic scenario by direct quadrature.
    """
    _set_verbosity(verbose)
    try:
        config = _load_config(config_path, L=L, N=N, g_tr=g_tr, btilde=btilde, scenario=scenario,
                              params=_parse_params(params))
        grid = config.build_grid()
        chosen = config.build_scenario()
        collision = config.collision_params()
        rule = SphereRule.product(polar_order)
        out_dir = Path(output_dir or config.outputs.directory)
        written = []

        click.echo(f"🎯 Direct quadrature of {chosen.name}: {radial_nodes} radial x {len(rule)} angular points")
        start = time.perf_counter()
        if full_grid:
            field = q_direct_field(chosen.pdf, grid, collision, radial_nodes, rule, jobs=jobs)
            written.append(write_field(out_dir / "q_oracle.bspf", field, t=chosen.t0))
            written.extend(path for path, _ in _write_slices(config, field, out_dir, "q_oracle", "Q"))
        else:
            i0 = grid.zero_index()
            for axis in config.outputs.slices:
                points = np.zeros((grid.N, 3))
                points[:] = grid.nodes_v[i0]
                points[:, AXES[axis]] = grid.nodes_v
                values = np.array([q_direct(chosen.pdf, p, collision, radial_nodes, rule) for p in points])
                written.append(write_slice_csv(out_dir / f"q_oracle_slice_{axis}.csv", grid.nodes_v, values,
                                               name="Q", axis_name=f"v_{axis}"))
        elapsed = time.perf_counter() - start
        written.append(write_manifest(out_dir / "oracle.json", {
            "command": "oracle",
            "config": config.model_dump(by_alias=True),
            "radial_nodes": radial_nodes,
            "sphere_rule": {"polar": rule.polar, "azimuthal": rule.azimuthal},
            "full_grid": full_grid,
            "wall_time": elapsed,
        }))
        click.echo(f"✅ Done in {elapsed:.1f}s. Created {len(written)} file(s):")
        for path in written:
            click.echo(f"   • {path}")
    except ConfigError as e:
        _fail(str(e), USAGE_ERROR)
    except SpectralBoltzmannError as e:
        _fail(str(e))


@cli.command('kernel-probe')
@click.option('--zeta', nargs=3, type=float, default=(1.0, 0.0, 0.0), help='Output frequency zeta')
@click.option('--direction', nargs=3, type=float, default=(1.0, 0.0, 0.0), help='Ray direction for xi')
@click.option('--xi-max', type=float, default=10.0, help='Largest |xi| on the ray')
@click.option('--points', type=click.IntRange(min=2), default=401, help='Samples along the ray')
@click.option('--g-tr', 'g_tr', type=float, default=8.0, help='Truncation speed')
@click.option('--btilde', type=float, default=None, help='Angular kernel constant (default 1/(4 pi))')
@click.option('--output', '-o', type=click.Path(dir_okay=False), default=None, help='CSV file (default: stdout)')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
def kernel_probe_cmd(zeta, direction, xi_max, points, g_tr, btilde, output, verbose):
    """
    Dump G^tr(xi, zeta) along the ray xi = s * direction as CSV (|xi|, value).
    """
    _set_verbosity(verbose)
    try:
        params = CollisionParams(g_tr=g_tr) if btilde is None else CollisionParams(g_tr=g_tr, btilde=btilde)
        s, values = kernel_probe(zeta, direction, xi_max, points, params)
        if output:
            path = write_table(output, ["abs_xi", "ghat"], np.column_stack([s, values]))
            click.echo(f"✅ Wrote {points} samples to {path}")
        else:
            click.echo("abs_xi,ghat")
            for si, vi in zip(s, values):
                click.echo(f"{si:.17g},{vi:.17g}")
    except (SpectralBoltzmannError, ValueError) as e:
        _fail(str(e), USAGE_ERROR)


@cli.command()
@model_options
@click.option('--method', '-m', type=click.Choice(['I', 'II']), default=None, help='Envelope fit method')
@click.option('--tol', type=float, default=None, help='Target bound on E_rel')
@click.option('--v-target', 'v_target', type=float, default=None, help='Largest speed the tolerance must hold to')
@click.option('--output-dir', '-o', default=None, help='Output directory (default: outputs.directory)')
@click.option('--contour/--no-contour', default=True, help='Also write the log10 E_rel contour table')
@execution_options
def advise(config_path, L, N, g_tr, btilde, scenario, params, method, tol, v_target, output_dir, contour,
           jobs, deterministic, verbose):
    """
    Fit a Maxwellian envelope to a scenario and recommend the truncation speed.
    """
    _set_verbosity(verbose)
    try:
        config = _load_config(config_path, L=L, N=N, btilde=btilde, scenario=scenario,
                              params=_parse_params(params), method=method, tol=tol, v_target=v_target)
        grid = config.build_grid()
        field = materialize(config.build_scenario(), grid)
        section = config.advisor
        collision = config.collision
        recommendation = advise_gtr(field, section.method, section.tol, section.v_target, lam=collision.lam,
                                    btilde=collision.btilde, v_ref=section.v_ref, gtr_ref=section.gtr_ref)
        out_dir = Path(output_dir or config.outputs.directory)
        payload = recommendation.to_dict()
        written = [write_manifest(out_dir / "advice.json", {
            "command": "advise",
            "config": config.model_dump(by_alias=True),
            "recommendation": payload,
        })]
        if contour:
            table = contour_table(np.arange(0.5, 8.01, 0.25), np.arange(1.0, 16.01, 0.25), recommendation.bound,
                                  collision.lam, collision.btilde, jobs=jobs)
            written.append(write_table(out_dir / "contour.csv", ["v\\g_tr"] + [f"{g:g}" for g in table.gtr_values],
                                       table.to_rows()[1:]))

        click.echo(json.dumps({k: payload[k] for k in ("method", "k", "c", "g_tr")}, indent=2))
        click.echo(f"✅ Created {len(written)} file(s):")
        for path in written:
            click.echo(f"   • {path}")
    except ConfigError as e:
        _fail(str(e), USAGE_ERROR)
    except SpectralBoltzmannError as e:
        _fail(str(e))


@cli.command()
@model_options
@click.option('--input', '-i', 'input_file', type=click.Path(), default=None,
              help='Field file to start from instead of the scenario')
@click.option('--output-dir', '-o', default=None, help='Output directory (default: outputs.directory)')
@execution_options
def evolve(config_path, L, N, g_tr, btilde, scenario, params, input_file, output_dir, jobs, deterministic, verbose):
    """
    Integrate df/dt = Q(f, f) (+ plasma terms) and write fields, moments and a manifest.
    """
    _set_verbosity(verbose)
    try:
        if input_file and not Path(input_file).is_file():
            _fail(f"Field file '{input_file}' not found", USAGE_ERROR)
        config = _load_config(config_path, L=L, N=N, g_tr=g_tr, btilde=btilde, scenario=scenario,
                              params=_parse_params(params))
        grid = config.build_grid()
        chosen = config.build_scenario()
        if input_file:
            initial, t_file = _initial_field(config, input_file)
        else:
            initial, t_file = chosen, chosen.t0
        integrator = config.integrator
        t0 = integrator.t0 if integrator.t0 is not None else t_file
        if integrator.t_final is None:
            _fail("integrator.t_final must be set for evolve", USAGE_ERROR)
        t_final = integrator.t_final
        options = EvolutionOptions(
            integrator=integrator.kind,
            output_times=config.output_times(t0, t_final),
            project=config.collision.project,
            negativity_abort=integrator.negativity_abort,
            jobs=jobs,
            deterministic=deterministic,
        )
        out_dir = Path(output_dir or config.outputs.directory)
        click.echo(f"⏱️  {integrator.kind} from t={t0:g} to t={t_final:g}, dt={integrator.dt:g}")
        result = run_evolution(initial, grid, config.collision_params(), t0, t_final, integrator.dt, options,
                               plasma=chosen.plasma)

        written = []
        if "field" in config.outputs.formats:
            for t, field in zip(result.times, result.fields):
                written.append(write_field(out_dir / f"f_t{t:.6f}.bspf", field, t=t))
        if "csv" in config.outputs.formats:
            written.append(write_table(out_dir / "moments.csv", MOMENT_COLUMNS, result.moment_log))
            written.extend(path for path, _ in _write_slices(config, result.final, out_dir, "f_final", "f"))
        written.append(write_manifest(out_dir / "manifest.json", {
            "command": "evolve",
            "config": config.model_dump(by_alias=True),
            "derived": config.derived(),
            "t0": t0,
            "jobs": jobs,
            "deterministic": deterministic,
            "wall_time": result.wall_time,
            "rhs_evaluations": result.rhs_evaluations,
            "negativity": result.negativity,
        }))
        click.echo(f"✅ Evolution finished in {result.wall_time:.1f}s. Created {len(written)} file(s):")
        for path in written:
            click.echo(f"   • {path}")
    except ConfigError as e:
        _fail(str(e), USAGE_ERROR)
    except (FileNotFoundError, FieldFileError) as e:
        _fail(str(e), USAGE_ERROR)
    except SpectralBoltzmannError as e:
        if verbose:
            logger.exception("Detailed error information:")
        _fail(str(e))


@cli.command()
@click.argument('suites', nargs=-1, type=click.Choice(sorted(SUITES) + ['all']))
@click.option('--smoke', is_flag=True, help='Reduced grids for a quick check')
@click.option('--report', type=click.Path(dir_okay=False), default=None, help='Write the checks as JSON')
@execution_options
def validate(suites, smoke: bool, report: Optional[str], jobs, deterministic, verbose):
    """
    Run validation suites and print a pass/fail table.

    SUITES: Suite names, or 'all'
    """
    _set_verbosity(verbose)
    names = list(SUITES) if not suites or 'all' in suites else list(dict.fromkeys(suites))
    checks = run_suites(names, smoke=smoke, jobs=jobs, deterministic=deterministic)

    name_width = min(max([len(c.name) for c in checks] + [20]), 50)
    click.echo(f"{'Suite':<13} {'Check':<{name_width}} {'Measured':>12} {'Limit':>12}  Result")
    click.echo("-" * (13 + name_width + 36))
    for check in checks:
        mark = "✅ pass" if check.passed else "❌ FAIL"
        click.echo(f"{check.suite:<13} {check.name[:name_width]:<{name_width}} "
                   f"{check.measured:>12.3e} {check.limit:>12.3e}  {mark}")
    failed = sum(not c.passed for c in checks)
    click.echo()
    click.echo(f"📊 {len(checks) - failed} passed, {failed} failed")
    if report:
        write_manifest(report, {"command": "validate", "smoke": smoke, "checks": [c.to_dict() for c in checks]})
    if failed:
        sys.exit(RUN_FAILURE)


@cli.command()
@click.argument('field_file', type=click.Path(exists=True, dir_okay=False))
def info(field_file: str):
    """
    Display a field file's header and moments.

    FIELD_FILE: Path to the field file
    """
    try:
        record = read_field(field_file)
        grid = record.field.grid
        click.echo(f"📄 {field_file}")
        click.echo("=" * 50)
        click.echo(f"Kind: {'real' if isinstance(record.field, RealField) else 'spectral'}")
        click.echo(f"N: {grid.N}")
        click.echo(f"L: {grid.L:g}")
        click.echo(f"t: {record.t:g}")
        click.echo(f"dv: {grid.dv:.6g}, dzeta: {grid.dzeta:.6g}")
        if isinstance(record.field, RealField):
            base = moments(record.field)
            click.echo(f"Mass: {base.mass:.15g}")
            click.echo(f"Momentum: {', '.join(f'{p:.6e}' for p in base.momentum)}")
            click.echo(f"Energy: {base.energy:.15g}")
            if base.mass > 0:
                high = higher_moments(record.field)
                click.echo(f"Pressure: {high.pressure:.15g}")
                click.echo(f"Fourth moment: {high.fourth_moment:.15g}")
            click.echo(f"Min value: {float(np.min(record.field.data)):.6e}")
    except SpectralBoltzmannError as e:
        _fail(str(e))


@cli.command()
@click.option('--port', '-p', default=8000, help='Port to run API on (default: 8000)')
@click.option('--host', '-h', default='0.0.0.0', help='Host to run API on (default: 0.0.0.0)')
@click.option('--reload', is_flag=True, help='Enable auto-reload for development')
def api(port: int, host: str, reload: bool):
    """
    Launch the FastAPI service for the advisor and kernel probes.
    """
    try:
        import uvicorn

        click.echo("🚀 Starting Spectral Boltzmann API...")
        click.echo(f"📡 API will be available at: http://localhost:{port}")
        click.echo(f"📖 API documentation at: http://localhost:{port}/docs")
        click.echo("\nPress Ctrl+C to stop the server")

        uvicorn.run(
            "spectral_boltzmann.api:app",
            host=host,
            port=port,
            reload=reload,
            log_level="info"
        )

    except ImportError:
        click.echo("❌ Error: FastAPI/Uvicorn is not installed", err=True)
        click.echo("Install them with: pip install fastapi uvicorn[standard]", err=True)
        sys.exit(RUN_FAILURE)
    except KeyboardInterrupt:
        click.echo("\n👋 API server stopped")
    except Exception as e:
        click.echo(f"❌ Error starting API server: {str(e)}", err=True)
        sys.exit(RUN_FAILURE)


def main():
    """Console-script entry point."""
    cli()


if __name__ == '__main__':
    main()
