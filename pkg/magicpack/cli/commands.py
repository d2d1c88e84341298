"""
CLI commands for MagicPack

Each command maps onto one library operation (or a short composition of them)
and reports through format_output. Failed checks raise, and the error handler
in main turns them into exit codes.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import mpmath

from ..exceptions import CLIError, ConditionFailedError, ValidationError
from ..core.bounds import extremal_density, lattice_shells, poisson_residual
from ..core.conditions import check_sign_48
from ..core.evaluation import FloatEvaluator, Side, check_sign_48_float, estimate_last_sign_change, sample_grid
from ..core.exactnum import PrecisionLadder
from ..core.magic import (
    compute_params,
    load_cnumbers,
    magic_function,
    parameters_table,
    verify_magic,
    verify_many,
)
from ..core.packing1d import (
    fejer_kissing_bound,
    fejer_sharpness,
    greedy,
    kalbe,
    kalbe_rows,
    optimal_packing,
    parse_distance_set,
    reduction_constant,
    reduce_to_finite,
    render_letter,
)
from ..core.persistence import read_accumulation, read_shells, render_rational, write_certificate, write_shells
from .utils import format_output, parse_fraction, parse_range, parse_rung

logger = logging.getLogger(__name__)


def _format(ctx: click.Context) -> str:
    return ctx.obj.get('output_format', 'table')


def _config(ctx: click.Context):
    return ctx.obj['config']


def _dimensions(ctx: click.Context, d: Optional[int], all_dims: bool, dmax: Optional[int]) -> List[int]:
    if all_dims:
        dmax = dmax or _config(ctx).get("magic.dimension_cap", 200)
        return [p.d for p in parameters_table(dmax)]
    if d is None:
        raise click.UsageError("Give a dimension with -d or use --all")
    return [d]


@click.command()
@click.option('-d', 'd', type=int, help='Dimension (a multiple of 8)')
@click.option('--all', 'all_dims', is_flag=True, help='Every admissible dimension up to --dmax')
@click.option('--dmax', type=int, help='Largest dimension for --all')
@click.pass_context
def params_command(ctx, d, all_dims, dmax):
    """Print the construction parameters (a, l, k, b, c)."""
    if all_dims:
        rows = [p.to_dict() for p in parameters_table(dmax or _config(ctx).get("magic.dimension_cap", 200))]
        format_output(_format(ctx), rows, "Magic function parameters")
        return
    if d is None:
        raise click.UsageError("Give a dimension with -d or use --all")
    params = compute_params(d)
    data = params.to_dict()
    data["forbidden_norms"] = list(params.forbidden_norms)
    format_output(_format(ctx), data, f"Parameters for d={d}")


@click.command()
@click.option('-d', 'd', type=int, help='Dimension (a multiple of 8)')
@click.option('--all', 'all_dims', is_flag=True, help='Every admissible dimension up to --dmax')
@click.option('--dmax', type=int, help='Largest dimension for --all')
@click.option('--workers', type=click.IntRange(min=1), default=1, show_default=True,
              help='Worker processes for --all')
@click.option('--strict-tails/--literal-tails', 'strict', default=None,
              help='Tail majorant reading used to choose N')
@click.option('--ladder', help='Starting precision rung PI,GAMMA,SPLIT (e.g. 20,2,4)')
@click.option('--no-cache', is_flag=True, help='Ignore and do not write the solution cache')
@click.option('--output', '-o', type=click.Path(), help='Certificate file (a directory with --all)')
@click.pass_context
def verify_command(ctx, d, all_dims, dmax, workers, strict, ladder, no_cache, output):
    """Build the magic function and certify its sign conditions."""
    config = _config(ctx)
    if strict is not None:
        config.set("magic.strict_tails", strict)
    if no_cache:
        config.set("cache.enabled", False)
    rung = None
    if ladder:
        rungs = tuple(tuple(r) for r in config.ladder_rungs())
        rung = PrecisionLadder(*parse_rung(ladder), rungs=rungs)

    dims = _dimensions(ctx, d, all_dims, dmax)
    if rung is not None or len(dims) == 1:
        certificates = [verify_magic(dim, ladder=rung) for dim in dims]
    else:
        certificates = verify_many(dims, workers)

    include_timing = config.get("certificate.include_timing", False)
    rows: List[Dict[str, Any]] = []
    for cert in certificates:
        path = None
        if output:
            path = Path(output) / f"cert-d{cert.params.d}.json" if all_dims else Path(output)
            write_certificate(cert, path, include_timing=include_timing)
        rows.append({
            "d": cert.params.d,
            "N": cert.n_trunc,
            "valid": cert.valid,
            "failed": cert.failed,
            "ladder": list(cert.ladder.as_tuple()),
            "certificate": str(path) if path else None,
        })
    format_output(_format(ctx), rows if all_dims else rows[0], "Verification")

    for cert in certificates:
        cert.raise_for_status()


@click.command()
@click.option('-d', 'd', type=int, required=True, help='Dimension (a multiple of 8)')
@click.pass_context
def cvectors_command(ctx, d):
    """Print the integer vectors C_phi and C_psi and the truncation order N."""
    fn = magic_function(d)
    data = {
        "d": d,
        "C_phi": list(fn.c_phi),
        "C_psi": list(fn.c_psi),
        "N": fn.n_trunc,
        "strict_tails": fn.strict_tails,
    }
    format_output(_format(ctx), data, f"C-vectors for d={d}")


@click.command()
@click.pass_context
def csign48_command(ctx):
    """Certify that H changes sign exactly at 6 and 8 on (0, 10) in dimension 48."""
    fn = magic_function(48)
    rung = PrecisionLadder.from_config(_config(ctx))
    while True:
        certified = check_sign_48(fn, rung)
        if certified or rung.is_top():
            break
        rung = rung.escalate()
    format_output(_format(ctx), {
        "certified": certified,
        "float_scan": check_sign_48_float(fn),
        "ladder": list(rung.as_tuple()),
    }, "Sign check for d=48")
    if not certified:
        raise ConditionFailedError("sign48", dimension=48)


@click.command()
@click.option('-d', 'd', type=int, required=True, help='Dimension (a multiple of 8)')
@click.option('--side', type=click.Choice(['h', 'hhat']), default='hhat', show_default=True)
@click.option('--range', 'range_text', default='0:10', show_default=True, help='Interval lo:hi of s = |x|^2')
@click.option('--step', default='1/100', show_default=True, help='Grid step (exact rational)')
@click.option('--output', '-o', type=click.Path(), help='TSV file (stdout when omitted)')
@click.pass_context
def plot_command(ctx, d, side, range_text, step, output):
    """Tabulate s and value(s)*exp(pi*s)/value(0) on a half-step offset grid."""
    lo, hi = parse_range(range_text)
    step = parse_fraction(step, "--step")
    if step <= 0:
        raise click.BadParameter("step must be positive", param_hint="--step")
    evaluator = FloatEvaluator(magic_function(d), Side.parse(side))
    label = "H" if evaluator.side == Side.H else "Hhat"
    lines = [f"s\t{label}(sqrt(s))*exp(pi*s)/{label}(0)"]
    for s in sample_grid(lo, hi, step):
        lines.append(f"{float(s)!r}\t{mpmath.nstr(evaluator.normalized(s), 15)}")
    text = "\n".join(lines) + "\n"
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("Wrote %d points to %s", len(lines) - 1, path)
    else:
        click.echo(text, nl=False)


@click.command()
@click.option('-d', 'd', type=int, required=True, help='Dimension (a multiple of 8)')
@click.option('--digits', type=click.IntRange(min=5), default=30, show_default=True)
@click.pass_context
def density_command(ctx, d, digits):
    """Print the extremal density vol(B_d)(sqrt(a)/2)^d."""
    value = extremal_density(d, digits)
    params = compute_params(d, allow_excluded=True)
    format_output(_format(ctx), {
        "d": d,
        "exact": str(value.exact),
        "decimal": value.decimal,
        "c": None if params.c is None else render_rational(params.c),
    }, f"Extremal density for d={d}")


@click.command()
@click.option('--shells', 'shells_path', type=click.Path(exists=True), required=True,
              help='Lattice shell file')
@click.option('--dual', 'dual_path', type=click.Path(exists=True), help='Dual lattice shells (default: --shells)')
@click.option('-d', 'd', type=int, help='Dimension (default: from the shell file)')
@click.option('--max-norm', type=int, help='Shell truncation (default a + 60)')
@click.option('--tolerance', type=float, help='Fail when the relative residual exceeds this')
@click.pass_context
def poisson_command(ctx, shells_path, dual_path, d, max_norm, tolerance):
    """Compare both sides of Poisson summation for a lattice."""
    shells = read_shells(shells_path)
    dual = read_shells(dual_path) if dual_path else shells
    result = poisson_residual(shells, dual, d or shells.d, max_norm=max_norm)
    format_output(_format(ctx), {
        "d": shells.d,
        "lattice_sum": mpmath.nstr(result.lattice_sum, 20),
        "dual_sum": mpmath.nstr(result.dual_sum, 20),
        "residual": result.render(),
        "relative": mpmath.nstr(result.relative, 5),
    }, "Poisson summation")
    if tolerance is not None and result.relative > tolerance:
        raise ConditionFailedError("poisson", dimension=shells.d,
                                   message=f"Relative residual {mpmath.nstr(result.relative, 5)} exceeds {tolerance}")


@click.command()
@click.option('--k', 'k_text', required=True, help='Distance set, e.g. 1,3/2,5/2')
@click.option('--max-vertices', type=click.IntRange(min=1), help='Domino graph vertex cap')
@click.option('--greedy', 'greedy_steps', type=click.IntRange(min=1), help='Also run greedy placement for N steps')
@click.pass_context
def pack1d_command(ctx, k_text, max_vertices, greedy_steps):
    """Optimal periodic packing of the line with distances in K."""
    try:
        K = parse_distance_set(k_text)
    except ValidationError as e:
        raise click.BadParameter(e.message, param_hint="--k")
    max_vertices = max_vertices or _config(ctx).get("packing.max_vertices", 20000)
    packing = optimal_packing(K, max_vertices)
    data: Dict[str, Any] = {"K": str(K)}
    data.update(packing.to_dict())
    if len(K) == 3 and K.values[0] == 1:
        alpha, beta = K.values[1], K.values[2]
        data["closed_form_case"] = str(kalbe_rows(alpha, beta))
        data["closed_form_density"] = render_letter(kalbe(alpha, beta).density)
    if greedy_steps:
        result = greedy(K, greedy_steps)
        data["greedy_density"] = render_letter(result.density)
    format_output(_format(ctx), data, "Optimal periodic packing")


@click.command()
@click.option('--desc', 'desc_path', type=click.Path(exists=True), required=True,
              help='Accumulation description (JSON)')
@click.option('--solve/--no-solve', default=True, show_default=True,
              help='Also solve the reduced finite instance')
@click.option('--max-vertices', type=click.IntRange(min=1), help='Domino graph vertex cap')
@click.pass_context
def reduce_command(ctx, desc_path, solve, max_vertices):
    """Reduce a distance set with accumulation points to a finite one."""
    desc = read_accumulation(desc_path)
    reduced = reduce_to_finite(desc)
    data: Dict[str, Any] = {
        "C": reduction_constant(desc) if desc.tails else 0,
        "reduced": str(reduced),
        "size": len(reduced),
    }
    if solve:
        max_vertices = max_vertices or _config(ctx).get("packing.max_vertices", 20000)
        data.update(optimal_packing(reduced, max_vertices).to_dict())
    format_output(_format(ctx), data, "Finite reduction")


@click.command()
@click.option('--lambda', 'lam', required=True, help='Scale lambda >= 7 (exact rational)')
@click.pass_context
def fejer_command(ctx, lam):
    """Fejer kernel sharpness and the resulting kissing bound in d = 1."""
    lam = parse_fraction(lam, "--lambda")
    n, ratio = fejer_sharpness(lam)
    bound = fejer_kissing_bound(lam)
    format_output(_format(ctx), {
        "lambda": render_rational(lam),
        "N": n,
        "ratio": render_rational(ratio),
        "kissing_bound": str(bound.exact),
        "decimal": bound.decimal,
    }, "Fejer family")


@click.command()
@click.option('--dmax', type=int, default=200, show_default=True, help='Largest dimension')
@click.option('--step', help='Sign scan step (default evaluation.sign_scan_step)')
@click.pass_context
def table_command(ctx, dmax, step):
    """Estimate c_d for every admissible d and compare with the bundled values."""
    step = parse_fraction(step, "--step") if step else None
    bundled = load_cnumbers()
    rows = []
    for params in parameters_table(dmax):
        estimate = estimate_last_sign_change(params.d, step=step)
        expected = bundled.get(params.d)
        rows.append({
            "d": params.d,
            "estimate": render_rational(estimate),
            "bundled": None if expected is None else render_rational(expected),
            "difference": None if expected is None else f"{float(estimate - expected):.4f}",
        })
    format_output(_format(ctx), rows, "Spectral thresholds c_d")


@click.command()
@click.option('--lattice', type=click.Choice(['e8', 'leech'], case_sensitive=False), required=True)
@click.option('--max-norm', type=click.IntRange(min=2), default=80, show_default=True)
@click.option('--output', '-o', type=click.Path(), required=True, help='Shell file (JSON)')
@click.pass_context
def shells_command(ctx, lattice, max_norm, output):
    """Write theta-series shell counts for E8 or the Leech lattice."""
    data = lattice_shells(lattice, max_norm)
    path = write_shells(data, output)
    format_output(_format(ctx), {
        "lattice": lattice,
        "d": data.d,
        "shells": len(data.shells),
        "first": [list(s) for s in data.shells[:3]],
        "file": str(path),
    }, "Lattice shells")


@click.command()
@click.option('--show', is_flag=True, help='Show the effective configuration')
@click.option('--get', 'get_option', help='Read one setting (dot path)')
@click.option('--save', '-s', type=click.Path(), help='Save the effective configuration')
@click.pass_context
def config_command(ctx, show, get_option, save):
    """Inspect the configuration."""
    config = _config(ctx)
    if get_option:
        value = config.get(get_option)
        if value is None:
            raise CLIError(f"Unknown setting: {get_option}", command="config", args={"get": get_option})
        format_output(_format(ctx), {get_option: value})
    if save:
        config.save_config(save)
        click.echo(f"Configuration saved to {save}")
    if show or not (get_option or save):
        format_output(_format(ctx), config.get_config(), "Configuration")
