"""
graphcolor command line

    graphcolor gen rjoin --chi 2 --r 3 --k 2 -o g.txt
    graphcolor color --alpha 2 --mode det g.txt
    graphcolor cover --family kb --w 9 --hh 9 --verify
    graphcolor attack --gadget kb --w 9 --hh 9 --victim pipeline3 --copies 5 --trials 1000
    graphcolor bench scaling --alpha 2 --sizes 16,24,32,48 --fit

JSON goes to stdout (or -o), logs go to stderr. Exit codes: 0 success,
2 validation failure, 3 budget exceeded, 4 bad arguments.
"""
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import click
import numpy as np
from scipy import stats

from config import Config
from app.exceptions import BadParams, ToolkitError
from app.models.clustering import NetworkDecomposition
from app.models.run_config import RunConfig
from app.services.adversary_service import AdversaryService
from app.services.analysis_service import AnalysisService
from app.services.coloring_service import ColoringService
from app.services.decomposition_service import DecompositionService
from app.services.gadget_service import GadgetService
from app.services.graph_service import GraphService
from app.services.simulation_service import PROGRAMS, SimulationService
from app.utils.graph_io import graph_text, read_graph, write_graph
from app.utils.seeding import derive_seed
from app.utils.serialization import json_default
from app.validators.param_validators import ParamValidator

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXIT_VALIDATION = 2
EXIT_BAD_ARGS = 4

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level: str = None):
    logging.basicConfig(level=(level or Config.LOG_LEVEL).upper(), format=LOG_FORMAT, stream=sys.stderr)


def emit(payload: dict, output: str = None):
    """Versioned JSON document; only 'generated_at' varies between identical runs"""
    document = dict(payload)
    document['schema'] = SCHEMA_VERSION
    document['generated_at'] = datetime.now(timezone.utc).isoformat(timespec='seconds')
    text = json.dumps(document, sort_keys=True, indent=2, default=json_default)
    if output:
        with open(output, 'w') as fh:
            fh.write(text + '\n')
        logger.info(f"Wrote {output}")
    else:
        click.echo(text)


class ToolkitGroup(click.Group):
    """Maps toolkit errors and usage errors onto the documented exit codes"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ToolkitError as e:
            logger.error(f"{e.__class__.__name__}: {e.message}")
            click.echo(json.dumps(e.to_dict(), sort_keys=True, default=json_default), err=True)
            ctx.exit(e.exit_code)
        except click.UsageError as e:
            e.show()
            ctx.exit(EXIT_BAD_ARGS)


def run_options(func):
    """--seed, --budget, --retry-limit and -o shared by the computing commands"""
    func = click.option('-o', '--output', type=click.Path(dir_okay=False), default=None,
                        help='Write to FILE instead of stdout')(func)
    func = click.option('--retry-limit', type=int, default=None, help='eps_cluster retries')(func)
    func = click.option('--budget', type=int, default=None, help='Exact solver node expansions')(func)
    func = click.option('--seed', type=int, default=None, help='Master seed')(func)
    return func


@click.group(cls=ToolkitGroup)
@click.option('--log-level', default=None, help='Overrides LOG_LEVEL')
def graphcolor(log_level):
    """LOCAL-model graph coloring toolkit"""
    configure_logging(log_level)


# ============================================
# gen
# ============================================

@graphcolor.group()
def gen():
    """Generate graph files"""


def _write_generated(graph, output):
    if output:
        emit({'n': graph.n, 'm': graph.m, 'meta': graph.meta, 'written': write_graph(graph, output)})
    else:
        click.echo(graph_text(graph), nl=False)


@gen.command('rjoin')
@click.option('--chi', type=int, required=True)
@click.option('--r', 'r', type=int, required=True)
@click.option('--k', 'k', type=int, required=True)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def gen_rjoin(chi, r, k, output):
    """Iterated r-join gadget G_k"""
    params = ParamValidator.require(ParamValidator.validate_rjoin({'chi': chi, 'r': r, 'k': k}))
    _write_generated(GadgetService.rjoin_gadget(**params), output)


@gen.command('kb')
@click.option('--w', 'w', type=int, required=True)
@click.option('--hh', type=int, required=True)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def gen_kb(w, hh, output):
    """Klein-bottle quadrangulation of a W x H grid"""
    params = ParamValidator.require(ParamValidator.validate_kb({'w': w, 'hh': hh}))
    _write_generated(GadgetService.kb_gadget(params['w'], params['hh']), output)


@gen.command('grid')
@click.option('--w', 'w', type=int, required=True)
@click.option('--hh', type=int, required=True)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def gen_grid(w, hh, output):
    params = ParamValidator.require(ParamValidator.validate_kb({'w': w, 'hh': hh}))
    _write_generated(GraphService.grid_graph(params['w'], params['hh']), output)


@gen.command('random-bipartite')
@click.option('--n', 'n', type=int, required=True)
@click.option('--p', 'p', type=float, required=True)
@click.option('--seed', type=int, default=None)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def gen_random_bipartite(n, p, seed, output):
    """Connected random bipartite graph"""
    run = RunConfig.from_options(seed=seed)
    _write_generated(GraphService.random_bipartite(n, p, run.seed), output)


# ============================================
# color / decompose / analyze / simulate
# ============================================

@graphcolor.command()
@click.argument('graph_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--alpha', type=int, default=2, show_default=True)
@click.option('--mode', type=click.Choice(ColoringService.MODES), default='det', show_default=True)
@click.option('--beta', type=float, default=None, help='Exponential shift rate (rand mode)')
@click.option('--records', is_flag=True, help='Include the hiding records')
@run_options
@click.pass_context
def color(ctx, graph_file, alpha, mode, beta, records, seed, budget, retry_limit, output):
    """Color GRAPH_FILE with at most alpha*(chi-1)+1 colors"""
    run = RunConfig.from_options(seed=seed, budget=budget, retry_limit=retry_limit, output=output)
    params = ParamValidator.require(ParamValidator.validate_pipeline(
        {'alpha': alpha, 'mode': mode, 'seed': run.seed}))
    g = read_graph(graph_file)
    result = ColoringService.full_pipeline(g, params['alpha'], mode=params['mode'], seed=params['seed'],
                                           budget=run.budget, beta=beta, retry_limit=run.retry_limit)
    payload = result.to_dict(include_records=records)
    payload['within_bound'] = result.within_bound
    emit(payload, run.output)
    if not (result.proper and result.within_bound):
        ctx.exit(EXIT_VALIDATION)


@graphcolor.command()
@click.argument('graph_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--alpha', type=int, default=2, show_default=True)
@click.option('--mode', type=click.Choice(ColoringService.MODES), default='det', show_default=True)
@click.option('--power', type=int, default=1, show_default=True, help='Decompose G^power')
@click.option('--beta', type=float, default=None)
@run_options
@click.pass_context
def decompose(ctx, graph_file, alpha, mode, power, beta, seed, budget, retry_limit, output):
    """(alpha, d)-network decomposition of GRAPH_FILE, re-verified from its JSON form"""
    run = RunConfig.from_options(seed=seed, budget=budget, retry_limit=retry_limit, output=output)
    params = ParamValidator.require(ParamValidator.validate_pipeline(
        {'alpha': alpha, 'mode': mode, 'seed': run.seed}))
    if power < 1:
        raise BadParams(f"power must be at least 1, got {power}")
    g = GraphService.power_graph(read_graph(graph_file), power)
    decomposition = DecompositionService.network_decomposition(
        g, params['alpha'], base=params['mode'], seed=params['seed'], beta=beta, retry_limit=run.retry_limit)

    data = decomposition.to_dict()
    restored = NetworkDecomposition.from_dict(g.n, data)
    report = AnalysisService.verify_decomposition(g, restored, params['alpha'], decomposition.max_diameter)
    emit({'decomposition': data, 'power': power, 'report': report.to_dict()}, run.output)
    if not report.passed:
        ctx.exit(EXIT_VALIDATION)


@graphcolor.command()
@click.argument('graph_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--chromatic', is_flag=True, help='Exact chromatic number with certificate')
@click.option('--local-chromatic', 'local_radius', type=int, default=None, metavar='R')
@click.option('--girth', is_flag=True)
@click.option('--parity', is_flag=True, help='KB orientation parity (needs family meta)')
@click.option('--stats', 'with_stats', is_flag=True, help='n, m, degrees, diameter')
@click.option('--budget', type=int, default=None)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def analyze(graph_file, chromatic, local_radius, girth, parity, with_stats, budget, output):
    """Graph facts; --stats is implied when no fact is requested"""
    run = RunConfig.from_options(budget=budget, output=output)
    g = read_graph(graph_file)
    facts = {}
    if chromatic:
        certificate = AnalysisService.exact_chromatic_number(g, run.budget)
        facts['chromatic'] = certificate.to_dict()
        facts['chi'] = certificate.chi
    if local_radius is not None:
        if local_radius < 0:
            raise BadParams(f"Radius must be non-negative, got {local_radius}")
        value, center = AnalysisService.local_chromatic_number(g, local_radius, run.budget)
        facts['local_chromatic'] = {'r': local_radius, 'value': value, 'argmax': center}
    if girth:
        value = AnalysisService.girth(g)
        facts['girth'] = None if value == math.inf else value
    if parity:
        if g.meta.get('family') != 'kb':
            raise BadParams('Parity needs a KB gadget file (family meta line missing)')
        facts['parity'] = GadgetService.kb_parity(int(g.meta['w']), int(g.meta['hh']))
    if with_stats or not facts:
        facts['stats'] = AnalysisService.graph_stats(g)
    emit(facts, run.output)


@graphcolor.command()
@click.argument('graph_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--program', type=click.Choice(sorted(PROGRAMS)), required=True)
@click.option('--radius', type=int, default=1, show_default=True, help='For flood and view')
@click.option('--max-rounds', type=int, default=1000, show_default=True)
@click.option('--trace', type=click.Path(dir_okay=False), default=None, help='JSON-lines trace file')
@click.option('--seed', type=int, default=None)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def simulate(graph_file, program, radius, max_rounds, trace, seed, output):
    """Run a demonstration node program in lockstep rounds"""
    run = RunConfig.from_options(seed=seed, output=output)
    factory = PROGRAMS[program]
    instance = factory(radius) if program in ('flood', 'view') else factory()
    g = read_graph(graph_file)
    result = SimulationService.run_sync(g, instance, max_rounds, run.seed, trace_path=trace)
    emit({'program': program, **result}, run.output)


# ============================================
# cover / attack
# ============================================

def _family_params(family, chi, r, k, w, hh):
    if family == 'rjoin':
        return {'chi': chi, 'r': r, 'k': k}
    return {'w': w, 'hh': hh}


def family_options(func):
    for name in ('hh', 'w', 'k', 'r', 'chi'):
        func = click.option(f'--{name}', name, type=int, default=None)(func)
    return func


@graphcolor.command()
@click.option('--family', type=click.Choice(ParamValidator.FAMILIES), required=True)
@family_options
@click.option('--verify', is_flag=True, help='Re-run every certificate clause')
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
@click.pass_context
def cover(ctx, family, chi, r, k, w, hh, verify, output):
    """Subgraph cover of a gadget with per-element certificates"""
    params = ParamValidator.require(ParamValidator.validate_family(
        family, _family_params(family, chi, r, k, w, hh), for_cover=True))
    built = GadgetService.build_cover(family, params)
    payload = {'cover': built.to_dict(), 'n': built.host.n, 'm': built.host.m}
    passed = True
    if verify:
        report = GadgetService.verify_cover(built.host, built, AdversaryService.target_chi(family, params))
        report.metrics.pop('certificates', None)
        payload['report'] = report.to_dict()
        passed = report.passed
    emit(payload, output)
    if not passed:
        ctx.exit(EXIT_VALIDATION)


@graphcolor.command()
@click.option('--gadget', 'family', type=click.Choice(ParamValidator.FAMILIES), required=True)
@family_options
@click.option('--victim', type=click.Choice(ParamValidator.VICTIMS), required=True)
@click.option('--copies', type=int, default=1, show_default=True, help='N copies of the chosen element')
@click.option('--trials', type=int, default=100, show_default=True)
@click.option('--jobs', type=int, default=1, show_default=True)
@click.option('--n', 'n', type=int, default=None, help='Target size (rjoin instances)')
@click.option('--target-w', type=int, default=None, help='Target grid width (kb instances)')
@click.option('--target-hh', type=int, default=None)
@click.option('--locality', type=int, default=None, help="Override the victim's declared locality")
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None,
              help='Per-trial outcomes as CSV')
@click.option('--seed', type=int, default=None)
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def attack(family, chi, r, k, w, hh, victim, copies, trials, jobs, n, target_w, target_hh,
           locality, csv_path, seed, output):
    """Amplify a victim's failure on a cheating instance"""
    run = RunConfig.from_options(seed=seed, jobs=jobs, output=output)
    params = ParamValidator.require(ParamValidator.validate_family(
        family, _family_params(family, chi, r, k, w, hh), for_cover=True))
    attack_params = ParamValidator.require(ParamValidator.validate_attack(
        {'copies': copies, 'trials': trials, 'victim': victim}))
    target = (target_w, target_hh) if target_w is not None and target_hh is not None else None

    report = AdversaryService.run_attack(
        family, params, attack_params['victim'], attack_params['copies'], attack_params['trials'],
        run.seed, jobs=run.jobs, n=n, target=target, locality=locality, keep_trials=bool(csv_path))
    if csv_path:
        with open(csv_path, 'w', newline='') as fh:
            writer = csv.DictWriter(fh, fieldnames=['trial', 'failed', 'copies_failed'])
            writer.writeheader()
            writer.writerows(report.trial_outcomes)
    emit(report.to_dict(), run.output)


# ============================================
# bench
# ============================================

def _bench_run(size: int, alpha: int, mode: str, seed: int, budget: int, retry_limit: int) -> tuple:
    """One pipeline run on the size x size grid: (n, rounds, colors_used)"""
    g = GraphService.grid_graph(size, size)
    result = ColoringService.full_pipeline(g, alpha, mode=mode, seed=seed, budget=budget, retry_limit=retry_limit)
    return g.n, result.ledger.distributed_total, result.colors_used


@graphcolor.group()
def bench():
    """Scaling experiments"""


@bench.command('scaling')
@click.option('--alpha', type=int, default=2, show_default=True)
@click.option('--sizes', default='16,24,32,48', show_default=True, help='Grid side lengths')
@click.option('--mode', type=click.Choice(ColoringService.MODES), default='rand', show_default=True)
@click.option('--repeats', type=int, default=1, show_default=True, help='Seeds per size (median taken)')
@click.option('--jobs', type=int, default=1, show_default=True)
@click.option('--fit', is_flag=True, help='Append the log-log slope of rounds against n')
@run_options
def bench_scaling(alpha, sizes, mode, repeats, jobs, fit, seed, budget, retry_limit, output):
    """CSV rows (n, rounds, colors_used) for the square grid corpus"""
    run = RunConfig.from_options(seed=seed, budget=budget, retry_limit=retry_limit, output=output,
                                fmt='csv', jobs=jobs)
    sides = ParamValidator.require(ParamValidator.validate_sizes(sizes))['sizes']
    params = ParamValidator.require(ParamValidator.validate_pipeline(
        {'alpha': alpha, 'mode': mode, 'seed': run.seed}))
    if repeats < 1:
        raise BadParams(f"repeats must be at least 1, got {repeats}")

    tasks = [(s, params['alpha'], params['mode'], derive_seed(run.seed, s, i), run.budget, run.retry_limit)
             for s in sides for i in range(repeats)]
    if run.jobs > 1:
        with ProcessPoolExecutor(max_workers=run.jobs) as executor:
            outcomes = list(executor.map(_bench_run, *zip(*tasks)))
    else:
        outcomes = [_bench_run(*task) for task in tasks]

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['n', 'rounds', 'colors_used'])
    rows = []
    for i in range(len(sides)):
        chunk = outcomes[i * repeats:(i + 1) * repeats]
        n = chunk[0][0]
        rounds = float(np.median([c[1] for c in chunk]))
        colors_used = max(c[2] for c in chunk)
        rows.append((n, rounds))
        writer.writerow([n, f"{rounds:g}", colors_used])

    if fit:
        if len(rows) < 2:
            raise BadParams('Fitting a slope needs at least two sizes')
        xs = np.log([row[0] for row in rows])
        ys = np.log([max(row[1], 1.0) for row in rows])
        regression = stats.linregress(xs, ys)
        buffer.write(f"# slope={regression.slope:.4f} r={regression.rvalue:.4f}\n")
        logger.info(f"log-log slope {regression.slope:.4f} over {len(rows)} sizes")

    if run.output:
        with open(run.output, 'w') as fh:
            fh.write(buffer.getvalue())
    else:
        click.echo(buffer.getvalue(), nl=False)


if __name__ == '__main__':
    graphcolor()
