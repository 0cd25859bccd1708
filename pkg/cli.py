import logging
import click

from config import VERSION, Tolerances, configure_logging, get_settings
from scalar_means import PositivePair
from search import DEFAULT_M_MAX, search_grid
from tables import FORMATS, convergence_rows, eval_record, min_m_rows, render_table, tightness_rows
from utils import format_float, parse_t_grid
from verify import (LOWER_ORDERS, PROPS41_COEFFICIENTS, UPPER_ORDERS, UPPER_VARIANTS, X_KINDS, InstanceSpec,
                    SuiteOptions, UnknownCheckError, run_lemma_grid, run_suite)

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_FAILED = 2
DEFAULT_T_GRID = "1e-3:1e3:61:log"


class LogmeanGroup(click.Group):
    """click group whose usage errors exit with status 1; ValueError/KeyError count as usage errors."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise
        except UnknownCheckError as e:
            raise _usage(e.args[0] if e.args else str(e))
        except (ValueError, KeyError) as e:
            raise _usage(str(e))


def _usage(message: str) -> click.UsageError:
    error = click.UsageError(message)
    error.exit_code = EXIT_USAGE
    return error


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"expected a comma separated list of integers, got {text!r}")
    if not values:
        raise ValueError("order list must not be empty")
    return values


def _emit(text: str, output: str | None) -> None:
    with click.open_file(output or "-", "w", encoding="utf-8") as f:
        f.write(text)
    if output:
        logger.info("Wrote %s", output)


format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
output_option = click.option("--output", type=click.Path(dir_okay=False, writable=True), default=None,
                             help="Output file (default: stdout).")


@click.group(cls=LogmeanGroup)
@click.version_option(VERSION)
@click.option("--log-level", default=None, help="Overrides LOGMEAN_LOG_LEVEL.")
def cli(log_level):
    configure_logging(log_level)


@cli.command(name="eval")
@click.option("--t", "t", type=float, default=None, help="Ratio a/b (b = 1).")
@click.option("--a", "a", type=float, default=None)
@click.option("--b", "b", type=float, default=None)
@click.option("--m", "m", type=int, default=1, show_default=True, help="Order of the sum families.")
@format_option
@output_option
def eval_cmd(t, a, b, m, fmt, output):
    """Evaluates every mean and bound at one point."""
    if t is not None and (a is not None or b is not None):
        raise click.UsageError("give either --t or --a/--b, not both")
    if t is not None:
        pair = PositivePair(t, 1.0)
    elif a is not None and b is not None:
        pair = PositivePair(a, b)
    else:
        raise click.UsageError("give --t or both --a and --b")
    record = eval_record(pair, m)
    _emit(render_table([record], "eval", fmt, {"version": VERSION}), output)


@cli.command()
@click.option("--t-grid", default=DEFAULT_T_GRID, show_default=True, help="lo:hi:count[:log|lin] or a list.")
@click.option("--m", "orders", default="1,2,5,10", show_default=True, help="Comma separated orders.")
@format_option
@output_option
def table(t_grid, orders, fmt, output):
    """Prints the tightness table: every bound and its gap to L(t, 1)."""
    grid = parse_t_grid(t_grid)
    orders = _int_list(orders)
    rows = tightness_rows(grid, orders)
    meta = {"version": VERSION, "t_grid": t_grid, "orders": orders}
    _emit(render_table(rows, "table", fmt, meta), output)


@cli.command()
@click.option("--seed", type=int, default=None, help="Overrides LOGMEAN_SEED.")
@click.option("--trials", type=int, default=None, help="Overrides LOGMEAN_TRIALS.")
@click.option("--dim", type=int, default=None, help="Fixed dimension (default: 1..8 per instance).")
@click.option("--checks", default=None, help="Comma separated check ids (default: all).")
@click.option("--m", "lower_orders", default=None,
              help="Comma separated orders for the lower chains (default: 1,2,3,5,10,32).")
@click.option("--m-upper", "upper_orders", default=None,
              help="Comma separated orders >= 2 for the upper chains (default: 2,3,5,10,32).")
@click.option("--tol-scalar", type=float, default=None)
@click.option("--tol-matrix", type=float, default=None)
@click.option("--tol-loewner", type=float, default=None)
@click.option("--workers", type=int, default=None, help="Overrides LOGMEAN_WORKERS.")
@click.option("--x-kind", type=click.Choice(X_KINDS), default="gaussian_complex", show_default=True)
@click.option("--allow-singular", is_flag=True, help="Zero eigenvalues with probability 1/4.")
@click.option("--upper-variant", type=click.Choice(UPPER_VARIANTS), default="ax_plus_xb", show_default=True)
@click.option("--props41-coefficient", type=click.Choice(tuple(PROPS41_COEFFICIENTS)), default="polya",
              show_default=True)
@click.option("--lemma-grid", is_flag=True, help="Run the exhaustive integer-exponent lemma grid instead.")
@format_option
@output_option
@click.pass_context
def verify(ctx, seed, trials, dim, checks, lower_orders, upper_orders, tol_scalar, tol_matrix, tol_loewner,
           workers, x_kind, allow_singular, upper_variant, props41_coefficient, lemma_grid, fmt, output):
    """Runs a seeded verification batch; exits 2 if any check fails."""
    settings = get_settings()
    if lemma_grid:
        report = run_lemma_grid()
    else:
        tolerances = Tolerances(
            scalar=tol_scalar if tol_scalar is not None else settings.tolerances.scalar,
            matrix=tol_matrix if tol_matrix is not None else settings.tolerances.matrix,
            loewner=tol_loewner if tol_loewner is not None else settings.tolerances.loewner,
        )
        spec = InstanceSpec(
            seed=seed if seed is not None else settings.seed,
            dim=dim,
            require_pd=not allow_singular,
            x_kind=x_kind,
        )
        options = SuiteOptions(
            tolerances=tolerances,
            lower_orders=tuple(_int_list(lower_orders)) if lower_orders else LOWER_ORDERS,
            upper_orders=tuple(_int_list(upper_orders)) if upper_orders else UPPER_ORDERS,
            upper_variant=upper_variant,
            props41_variant=props41_coefficient,
            workers=workers if workers is not None else settings.workers,
        )
        selected = checks.split(",") if checks else None
        report = run_suite(spec, trials if trials is not None else settings.trials, selected, options)

    _emit(render_table(report.rows(), "verify", fmt, report.full_meta()), output)

    for check_id, summary in report.checks.items():
        worst = min((s.worst_ratio for s in summary.links.values() if s.worst_ratio is not None), default=None)
        click.echo(f"{check_id}: runs={summary.runs} failed={summary.failed} skipped={summary.skipped} "
                   f"worst_margin/tol={format_float(worst)}", err=True)
    if not report.passed:
        click.echo(f"FAIL: {report.failures} failing check runs", err=True)
        ctx.exit(EXIT_FAILED)
    click.echo("PASS", err=True)


@cli.command()
@click.option("--t", "t", type=float, required=True, help="Ratio a/b; must differ from 1.")
@click.option("--m", "orders", default="8,16,32,64", show_default=True, help="Comma separated orders.")
@format_option
@output_option
def converge(t, orders, fmt, output):
    """Errors of alpha_m and beta_m against L(t, 1) and the fitted convergence order."""
    rows, fitted = convergence_rows(t, _int_list(orders))
    _emit(render_table(rows, "converge", fmt, dict(fitted, version=VERSION)), output)
    click.echo(f"fitted order: alpha {fitted['alpha_order']:.4f}, beta {fitted['beta_order']:.4f}", err=True)


@cli.command(name="min-m")
@click.option("--t-grid", default=DEFAULT_T_GRID, show_default=True, help="lo:hi:count[:log|lin] or a list.")
@click.option("--m-max", type=int, default=DEFAULT_M_MAX, show_default=True)
@format_option
@output_option
def min_m(t_grid, m_max, fmt, output):
    """Least m with beta_m(t) <= Lin(t, 1) for each t of the grid."""
    rows, summary = search_grid(parse_t_grid(t_grid), m_max)
    if summary["grid_max"] is None:
        summary["grid_max"] = f"NOT_FOUND({m_max})"
    meta = dict(summary, version=VERSION, t_grid=t_grid)
    _emit(render_table(min_m_rows(rows, m_max), "min-m", fmt, meta), output)
    click.echo(f"grid max: {summary['grid_max']} at t={format_float(summary['grid_max_t'])}; "
               f"non-increasing away from t=1: {format_float(summary['decreasing_away_from_one'])}", err=True)


if __name__ == "__main__":
    cli()
