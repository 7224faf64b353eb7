"""Command-line surface.

Subcommands mirror the library pipeline: `oog` solves one realization,
`risk` runs the full scenario assessment, `allocate` searches protection
subsets, `zeros` tabulates transmission zeros, and `validate` cross-checks
the SDP against the finite-horizon oracle.  Reports are JSON documents
(validated against shipped schemas) plus flat CSV tables; the risk and
allocate paths also render their figures next to the tables.  Failures
exit nonzero with a machine-readable error document on stderr.
"""

import functools
import json
import os
import sys

import click
import numpy as np

from . import allocation, boundedness, impact, modelio, oracle, plots
from . import reporting, risk, uncertainty
from .errors import EXIT_IO, OogriskError, ValidationError
from .statespace import AttackSelection, assemble_closed_loop


def _fail(exc, code):
    doc = reporting.error_document(exc)
    doc["exit_code"] = code
    click.echo(json.dumps(doc, indent=2, sort_keys=True), err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except OogriskError as exc:
            _fail(exc, exc.exit_code)
        except FileNotFoundError as exc:
            _fail(exc, EXIT_IO)
        except OSError as exc:
            _fail(exc, EXIT_IO)

    return wrapper


def _outdir(path):
    path = path or os.environ.get("OOGRISK_OUTPUT_DIR", ".")
    os.makedirs(path, exist_ok=True)
    return path


def _realized(model, spec, delta):
    delta = list(delta) if delta else [0.0] * spec.dim
    plant = uncertainty.realize(spec, model.plant, delta)
    return assemble_closed_loop(plant, model.controller, model.detector,
                                model.attack, tuple(delta)), delta


def _echo(doc):
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


_model_arg = click.argument("model_path", metavar="MODEL",
                            type=click.Path(dir_okay=False))
_delta_opt = click.option("--delta", multiple=True, type=float,
                          help="Uncertainty value (repeat per parameter; "
                               "defaults to all zeros).")
_outdir_opt = click.option("--output-dir", default=None,
                           help="Report directory (default: "
                                "$OOGRISK_OUTPUT_DIR or '.').")
_canonical_opt = click.option("--canonical", is_flag=True,
                              help="Omit timing so reruns are byte-identical.")


def _scenario_options(fn):
    for deco in (
        click.option("--beta", default=0.1, show_default=True,
                     help="VaR level."),
        click.option("--eps1", default=0.05, show_default=True,
                     help="Scenario accuracy epsilon_1."),
        click.option("--beta1", default=0.1, show_default=True,
                     help="Scenario confidence beta_1."),
        click.option("--seed", default=0, show_default=True, type=int),
        click.option("--samples", default=None, type=int,
                     help="Override the sample count N1."),
    ):
        fn = deco(fn)
    return fn


@click.group()
@click.version_option(package_name="oogrisk")
def main():
    """Risk assessment of stealthy attacks on uncertain control loops."""


@main.command()
@_model_arg
@_delta_opt
@click.option("--fdi-grid", default=2048, show_default=True,
              help="Unit-circle grid size for the frequency check.")
@_outdir_opt
@_canonical_opt
@handle_errors
def oog(model_path, delta, fdi_grid, output_dir, canonical):
    """Impact of one realization: SDP + frequency check + zero test."""
    model, spec = modelio.load_model(model_path)
    sys_cl, delta = _realized(model, spec, delta)
    result = impact.solve_oog(sys_cl)
    cls = boundedness.classify_boundedness(sys_cl)
    fdi = None
    if result.status == "bounded":
        fdi = impact.fdi_sweep(sys_cl, result.gamma, fdi_grid)
    doc = reporting.impact_report(model.name, delta, result, fdi, cls,
                                  canonical)
    reporting.write_report(doc, os.path.join(_outdir(output_dir),
                                             "impact_report.json"))
    _echo(doc)


_BETA_GRID = [round(0.02 * k, 2) for k in range(1, 26)]


@main.command("risk")
@_model_arg
@_scenario_options
@_outdir_opt
@_canonical_opt
@handle_errors
def risk_cmd(model_path, beta, eps1, beta1, seed, samples, output_dir,
             canonical):
    """Scenario VaR assessment with per-sample table, curve data and plot."""
    model, spec = modelio.load_model(model_path)
    cfg = uncertainty.ScenarioConfig(epsilon1=eps1, beta1=beta1, beta=beta,
                                     n_override=samples, seed=seed)
    rep = risk.assess_risk(model, spec, cfg)
    grid = sorted(set(_BETA_GRID) | {beta})
    curve = risk.var_curve(rep.gammas, grid)
    out = _outdir(output_dir)
    doc = reporting.risk_report(rep, curve, canonical, model.name)
    reporting.write_report(doc, os.path.join(out, "risk_report.json"))
    reporting.write_samples_csv(rep, os.path.join(out, "samples.csv"))
    reporting.write_var_curve_csv(curve, os.path.join(out, "var_curve.csv"))
    plots.render_var_curve(curve, rep.gammas,
                           os.path.join(out, "var_curve.png"))
    summary = {k: doc[k] for k in ("kind", "model", "var_value", "beta",
                                   "epsilon1", "beta1", "N1", "seed",
                                   "bounded_count", "failure_count")}
    _echo(summary)


def _vulnerability_attack(model, labels):
    """Build the attack surface implied by the vulnerability labels."""
    prefixes = {lab[0] for lab in labels}
    if prefixes - {"S", "A"} or len(prefixes) != 1:
        raise ValidationError(
            "vulnerabilities must be channel labels with a single prefix: "
            "S1,S2,... (sensors) or A1,A2,... (actuators)"
        )
    mode = "sensor" if prefixes == {"S"} else "actuator"
    try:
        chans = tuple(int(lab[1:]) - 1 for lab in labels)
    except ValueError:
        raise ValidationError(f"malformed channel labels: {labels}")
    return AttackSelection(mode, chans, model.plant.n_u, model.plant.n_m)


@main.command()
@_model_arg
@click.option("--budget", required=True, type=int,
              help="Maximum number of channels to protect (n_w).")
@click.option("--metric", default="var", show_default=True,
              type=click.Choice(["var", "nominal"]),
              help="Risk metric minimized by the search.")
@click.option("--vulnerabilities", default=None,
              help="Comma-separated channel labels, e.g. S1,S2,S3 or A1,A2 "
                   "(default: every sensor).")
@_scenario_options
@_outdir_opt
@_canonical_opt
@handle_errors
def allocate(model_path, budget, metric, vulnerabilities, beta, eps1, beta1,
             seed, samples, output_dir, canonical):
    """Exhaustive protection-budget allocation with paired metric ledgers."""
    model, spec = modelio.load_model(model_path)
    if vulnerabilities:
        labels = tuple(v.strip() for v in vulnerabilities.split(",") if v.strip())
    else:
        labels = tuple(f"S{i + 1}" for i in range(model.plant.n_m))
    model = model.with_attack(_vulnerability_attack(model, labels))
    cfg = uncertainty.ScenarioConfig(epsilon1=eps1, beta1=beta1, beta=beta,
                                     n_override=samples, seed=seed)
    metric_name = "var" if metric == "var" else "nominal_impact"
    problem = allocation.AllocationProblem.for_model(model, budget, metric_name)
    if metric_name == "var":
        main_res, nom_res = allocation.compare_metrics(model, spec, cfg, problem)
    else:
        main_res, nom_res = allocation.solve_smap(model, spec, cfg, problem), None
    out = _outdir(output_dir)
    doc = reporting.allocation_report(main_res, nom_res, canonical, model.name)
    reporting.write_report(doc, os.path.join(out, "allocation_report.json"))
    reporting.write_ledger_csv(main_res, os.path.join(out, "ledger.csv"),
                               nom_res)
    nom_by_subset = ({e.subset: e.value for e in nom_res.ledger}
                     if nom_res else {})
    rows = [("+".join(e.subset) if e.subset else "none", e.value,
             nom_by_subset.get(e.subset)) for e in main_res.ledger]
    plots.render_allocation_bars(rows, os.path.join(out, "allocation.png"))
    summary = {k: doc[k] for k in ("kind", "model", "metric", "best_set",
                                   "best_value")}
    if nom_res is not None:
        summary["nominal_best_set"] = doc["nominal_best_set"]
        summary["nominal_best_value"] = doc["nominal_best_value"]
    _echo(summary)


@main.command()
@_model_arg
@_delta_opt
@_outdir_opt
@_canonical_opt
@handle_errors
def zeros(model_path, delta, output_dir, canonical):
    """Transmission zeros of the residual channel with the boundedness verdict."""
    model, spec = modelio.load_model(model_path)
    sys_cl, _ = _realized(model, spec, delta)
    cls = boundedness.classify_boundedness(sys_cl)
    records = cls.zeros
    out = _outdir(output_dir)
    doc = reporting.zeros_report(records, cls, canonical, model.name)
    reporting.write_report(doc, os.path.join(out, "zeros_report.json"))
    reporting.write_zeros_csv(records, os.path.join(out, "zeros.csv"))
    _echo(doc)


@main.command()
@_model_arg
@_delta_opt
@click.option("--horizon", default=None, type=int,
              help="Attack horizon T (default scales with the decay rate).")
@_outdir_opt
@_canonical_opt
@handle_errors
def validate(model_path, delta, horizon, output_dir, canonical):
    """Cross-check the SDP value against the finite-horizon oracle."""
    model, spec = modelio.load_model(model_path)
    sys_cl, _ = _realized(model, spec, delta)
    sdp = impact.solve_oog(sys_cl)
    if horizon:
        T, N = int(horizon), 4 * int(horizon)
    else:
        T, N = oracle.default_horizons(sys_cl)
    ora = oracle.finite_horizon_oog(sys_cl, T, N)
    check = None
    if ora.status == "ok" and ora.attack is not None:
        check = oracle.validate_attack(sys_cl, ora.attack, N)
    doc = reporting.oracle_report(model.name, sdp, ora, check, (T, N),
                                  canonical)
    reporting.write_report(doc, os.path.join(_outdir(output_dir),
                                             "oracle_report.json"))
    _echo(doc)


if __name__ == "__main__":
    main()
