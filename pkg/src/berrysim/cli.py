"""Command-line client for the simulation campaigns.

Each subcommand builds the run configuration (file plus flag overrides)
and either executes it in-process or, with --server, posts it to a running
service instance and stores the returned CSV.  Exit codes: 0 success, 1
configuration error, 2 numerical/convergence error.
"""

from __future__ import annotations

import sys

import click

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigurationError, NumericalError
from .experiments import SWEEPS, simulate_trajectory, spectrum_report

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="Configuration file (flat dotted keys).")(fn)
    fn = click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None,
                      help="Write the CSV here instead of stdout.")(fn)
    fn = click.option("--decoherence", type=click.Choice(["on", "off"]), default=None,
                      help="Override the decoherence pipeline switch.")(fn)
    fn = click.option("--shots", type=int, default=None, help="Sampled-readout shot count (0 = exact).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Readout sampling seed.")(fn)
    fn = click.option("--dt-ps", type=float, default=None, help="Integrator step (ps).")(fn)
    fn = click.option("--workers", type=int, default=None, help="Concurrent sweep-point workers.")(fn)
    fn = click.option("--server", default=None, metavar="URL",
                      help="Send the request to a running berrysim service instead.")(fn)
    return fn


def _build_config(config_path, decoherence, shots, seed, dt_ps, workers, axis=None) -> RunConfig:
    overrides: dict = {}
    if decoherence is not None:
        overrides["decoherence"] = decoherence == "on"
    if shots is not None:
        overrides["readout.shots"] = shots
    if seed is not None:
        overrides["readout.seed"] = seed
    if dt_ps is not None:
        overrides["numerics.dt_ps"] = dt_ps
    if workers is not None:
        overrides["workers"] = workers
    if axis is not None:
        overrides["sweep.axis"] = axis
    return load_config(config_path, overrides)


def _emit(text: str, output_path: str | None) -> None:
    if output_path is None:
        click.echo(text, nl=False)
    else:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"wrote {output_path}", err=True)


def _post(server: str, path: str, payload: dict) -> dict:
    import httpx

    response = httpx.post(f"{server.rstrip('/')}{path}", json=payload, timeout=3600.0)
    if response.status_code == 422:
        raise ConfigurationError(response.text)
    if response.status_code != 200:
        raise NumericalError(f"service error {response.status_code}: {response.text}")
    return response.json()


def _run_sweep_command(axis, config_path, output_path, decoherence, shots, seed, dt_ps,
                       workers, server):
    config = _build_config(config_path, decoherence, shots, seed, dt_ps, workers, axis=axis)
    if server is not None:
        data = _post(server, f"/sweep/{axis}", {"config": config.model_dump()})
        _emit(data["csv"], output_path)
        return
    result = SWEEPS[axis](config)
    _emit(result.to_csv(), output_path)


def _sweep_command(axis: str, help_text: str):
    @click.command(name=f"sweep-{axis}", help=help_text)
    @_common_options
    def cmd(config_path, output_path, decoherence, shots, seed, dt_ps, workers, server):
        _run_sweep_command(axis, config_path, output_path, decoherence, shots, seed,
                           dt_ps, workers, server)

    return cmd


@click.group(invoke_without_command=False)
@click.version_option(version=__version__, prog_name="berrysim")
def cli():
    """Geometric-phase interferometry simulator for multi-level qubits."""


@cli.command(help="Charge-basis level structure and derived ratios.")
@_common_options
def spectrum(config_path, output_path, decoherence, shots, seed, dt_ps, workers, server):
    config = _build_config(config_path, decoherence, shots, seed, dt_ps, workers)
    if server is not None:
        report = _post(server, "/spectrum", {"config": config.model_dump()})
    else:
        report = spectrum_report(config)
    lines = [
        f"E_J/E_C        = {report['ej_over_ec']:.3f}",
        f"omega01/2pi    = {report['omega01_ghz']:.5f} GHz"
        f"  (asymptotic {report['asymptotic_omega01_ghz']:.5f} GHz)",
        "alpha_j/2pi    = "
        + ", ".join(f"{a:.2f}" for a in report["alpha_mhz_charge_basis"])
        + " MHz (charge basis)",
        "alpha_j/2pi    = "
        + ", ".join(f"{a:.2f}" for a in report["alpha_mhz_effective"])
        + " MHz (effective)",
        f"detuning/2pi   = {report['detuning_mhz']:.2f} MHz",
        f"k = delta/alpha2 = {report['k']:.5f}",
    ]
    _emit("\n".join(lines) + "\n", output_path)


cli.add_command(_sweep_command("angle", "Phase vs solid angle for the three contours."))
cli.add_command(_sweep_command("detuning", "Phase vs detuning at fixed solid angles."))
cli.add_command(_sweep_command("tau", "Phase and fidelity vs phase-sweep time."))


@cli.command(help="Single contour with a full trajectory dump.")
@click.option("--contour", type=click.Choice(["-+", "+-", "++", "--"]), default="-+")
@_common_options
def simulate(contour, config_path, output_path, decoherence, shots, seed, dt_ps, workers, server):
    config = _build_config(config_path, decoherence, shots, seed, dt_ps, workers)
    if server is not None:
        data = _post(server, "/simulate", {"config": config.model_dump(), "contour": contour})
        click.echo(
            f"gamma = {data['gamma_rad']:.6f} rad (ideal {data['gamma_ideal_rad']:.6f}), "
            f"bloch = {data['bloch_length']:.4f}, p2_max = {data['p2_max']:.4f}, "
            f"fidelity = {data['fidelity']:.4f}",
            err=True,
        )
        _emit(data["csv"], output_path)
        return
    run, csv_text = simulate_trajectory(config, contour)
    click.echo(
        f"gamma = {run.gamma:.6f} rad (ideal {run.gamma_ideal:.6f}), "
        f"bloch = {run.bloch:.4f}, p2_max = {run.p2_max:.4f}, fidelity = {run.fidelity:.4f}",
        err=True,
    )
    _emit(csv_text, output_path)


@cli.command(help="Run the HTTP service.")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    import uvicorn

    uvicorn.run("berrysim.service:app", host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc}", err=True)
        return EXIT_CONFIG
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG
    except NumericalError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        return EXIT_NUMERICAL
    except click.Abort:
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
