"""
Command line front end.

    nilsection run SPEC... [--checks adjunction,delta2,theorem,alb,lemmas]
                           [--format json|text] [--seed N] [--out DIR] [-v|-q]
    nilsection corpus --seed N --size K --out DIR
    nilsection specs

Exit status: 0 when every selected check passes or is hypothesis-gated,
1 when a check fails, 2 for input and usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .alb import build_alb, fixed_components_alb1, lifts_to_alb2, plot_data, reconcile_with_delta2
from .curve import (
    EquivariantPi1Data,
    SpecError,
    build,
    bundled_specs,
    check_gluing_lemmas,
    dump_spec,
    load_spec,
    sym_pi0,
    verify_unit_adjunction,
)
from .obstruction import (
    VERDICT_FAIL,
    check_pushforward_injective,
    check_representative_independence,
    delta2_lift,
    verify_main_theorem,
)
from .presets import CurveModelError
from .spec_generator import generate_corpus
from .zcoh import check_cup_wedge_injective, h1

logger = logging.getLogger(__name__)

CHECKS = ('adjunction', 'delta2', 'theorem', 'alb', 'lemmas')
FORMATS = ('json', 'text')
LOG_LEVEL_ENV = 'NILSECTION_LOG_LEVEL'
LOG_FORMAT = '%(asctime)s [%(levelname)s] %(message)s'

# cup-wedge injectivity is enumerated exhaustively up to this rank
CUP_WEDGE_RANK_LIMIT = 4

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

DEFAULT_CONFIG: Dict[str, Any] = {
    'checks': list(CHECKS),
    'format': 'json',
    'seed': 0,
    'out': None,
    'log_level': 'WARNING',
}


class UsageError(ValueError):
    """Invalid command line or run configuration."""


def default_config() -> Dict[str, Any]:
    """DEFAULT_CONFIG with the log level taken from NILSECTION_LOG_LEVEL when set."""
    config = dict(DEFAULT_CONFIG, checks=list(DEFAULT_CONFIG['checks']))
    env_level = os.environ.get(LOG_LEVEL_ENV)
    if env_level:
        config['log_level'] = env_level.upper()
    return config


@dataclass
class RunConfig:
    inputs: List[str]
    checks: List[str] = field(default_factory=lambda: list(DEFAULT_CONFIG['checks']))
    format: str = DEFAULT_CONFIG['format']
    seed: int = DEFAULT_CONFIG['seed']
    out: Optional[Path] = DEFAULT_CONFIG['out']
    log_level: str = DEFAULT_CONFIG['log_level']

    def __post_init__(self):
        if not self.inputs:
            raise UsageError("No spec given")
        if not self.checks:
            raise UsageError("--checks needs at least one check")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise UsageError(f"Unknown checks {unknown}; choose from {', '.join(CHECKS)}")
        if self.format not in FORMATS:
            raise UsageError(f"Unknown format '{self.format}'; choose from {', '.join(FORMATS)}")
        if self.out is not None:
            self.out = Path(self.out)

    @classmethod
    def from_dict(cls, inputs: Sequence[str], overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        config = default_config()
        config.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(list(inputs), **config)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def _check_adjunction(data: EquivariantPi1Data, config: RunConfig) -> Dict[str, Any]:
    report = verify_unit_adjunction(data)
    return {
        'passed': report.status != 'fail',
        'report': report.to_dict(),
        'sym_pi0': sym_pi0(data).to_dict(),
    }


def _check_delta2(data: EquivariantPi1Data, config: RunConfig) -> Dict[str, Any]:
    rng = np.random.default_rng(config.seed)
    values = {}
    independent = True
    for x in h1(data.abelianization).elements():
        values[''.join(str(v) for v in x.coordinates()) or '()'] = list(delta2_lift(data, x).coordinates())
        independent = check_representative_independence(data, x, rng=rng) and independent
    return {
        'passed': independent,
        'h1': h1(data.abelianization).describe(),
        'delta2': values,
        'representative_independent': independent,
    }


def _check_theorem(data: EquivariantPi1Data, config: RunConfig) -> Dict[str, Any]:
    report = verify_main_theorem(data)
    return {'passed': report.verdict != VERDICT_FAIL, 'report': report.to_dict(), 'table': report.table}


def _check_alb(data: EquivariantPi1Data, config: RunConfig) -> Dict[str, Any]:
    rng = np.random.default_rng(config.seed)
    model1, model2 = build_alb(data, 1), build_alb(data, 2)
    models_ok = model1.check_model(rng) and model2.check_model(rng)
    report = reconcile_with_delta2(data, model1, model2)
    lifts = [lifts_to_alb2(model2, fc).to_dict() for fc in fixed_components_alb1(model1)]
    return {
        'passed': models_ok and report.passed,
        'models_consistent': models_ok,
        'reconcile': report.to_dict(),
        'lifts': lifts,
        'plot': {'alb1': plot_data(model1), 'alb2': plot_data(model2)},
        'table': report.table,
    }


def _check_lemmas(data: EquivariantPi1Data, config: RunConfig) -> Dict[str, Any]:
    gluing = check_gluing_lemmas(data)
    pushforward = check_pushforward_injective(data)
    out = {'gluing': gluing.to_dict(), 'pushforward': pushforward.to_dict()}
    passed = gluing.passed and pushforward.passed
    if data.abelianization.rank <= CUP_WEDGE_RANK_LIMIT:
        cup_wedge = check_cup_wedge_injective(data.abelianization)
        out['cup_wedge'] = cup_wedge.to_dict()
        passed = passed and cup_wedge.passed
    out['passed'] = passed
    out['table'] = gluing.table
    return out


CHECK_RUNNERS = {
    'adjunction': _check_adjunction,
    'delta2': _check_delta2,
    'theorem': _check_theorem,
    'alb': _check_alb,
    'lemmas': _check_lemmas,
}


def run_checks(source: str, config: RunConfig) -> Dict[str, Any]:
    """
    Load, build and check one spec.

    Returns:
        result dict with 'success', 'error', 'input_error' and 'checks'
    """
    try:
        spec = load_spec(source)
        data = build(spec)
    except (SpecError, CurveModelError) as e:
        logger.error(f"{source}: {e}")
        return {'source': source, 'success': False, 'error': str(e), 'input_error': True, 'checks': {}}

    checks = {}
    for name in config.checks:
        logger.info(f"{spec.name}: running {name}")
        checks[name] = CHECK_RUNNERS[name](data, config)
    failed = [name for name, result in checks.items() if not result['passed']]
    return {
        'source': source,
        'name': spec.name,
        'success': not failed,
        'error': f"failed checks: {', '.join(failed)}" if failed else None,
        'input_error': False,
        'summary': data.summary(),
        'build_log': data.build_log,
        'checks': checks,
    }


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _jsonable(value: Any) -> Any:
    if isinstance(value, pd.DataFrame):
        return _jsonable(value.to_dict(orient='records'))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items() if k != 'table'}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def render_json(results: List[Dict[str, Any]], config: RunConfig) -> str:
    document = {
        'seed': config.seed,
        'checks': list(config.checks),
        'success': all(r['success'] for r in results),
        'results': _jsonable(results),
    }
    return json.dumps(document, indent=2, default=str)


def render_text(results: List[Dict[str, Any]], config: RunConfig) -> str:
    lines = []
    for result in results:
        title = result.get('name', result['source'])
        status = "PASS" if result['success'] else "FAIL"
        lines.append(f"=== {title}: {status}")
        if result['error']:
            lines.append(f"    {result['error']}")
        if result['input_error']:
            continue
        for key, value in result['summary'].items():
            lines.append(f"    {key}: {value}")
        lines.append("")
        lines.append("build log:")
        lines.append(result['build_log'].to_string(index=False))
        for name, check in result['checks'].items():
            lines.append("")
            lines.append(f"[{name}] {'pass' if check['passed'] else 'FAIL'}")
            if 'table' in check and not check['table'].empty:
                lines.append(check['table'].to_string(index=False))
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def run(config: RunConfig) -> int:
    """Run the selected checks on every input; write or print the report; return the exit status."""
    results = [run_checks(source, config) for source in config.inputs]
    text = render_json(results, config) if config.format == 'json' else render_text(results, config)
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        target = config.out / ('report.json' if config.format == 'json' else 'report.txt')
        target.write_text(text + "\n")
        logger.info(f"Report written to {target}")
    else:
        print(text)

    if any(r['input_error'] for r in results):
        return EXIT_INPUT_ERROR
    if not all(r['success'] for r in results):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def corpus_generate(seed: int, size: int, out_dir: Path) -> List[Path]:
    """Write a generated corpus as one CurveSpec JSON file per spec."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [dump_spec(spec, out_dir / f"{spec.name}.json") for spec in generate_corpus(seed, size)]
    logger.info(f"Wrote {len(paths)} specs to {out_dir}")
    return paths


def _parse_checks(value: str) -> List[str]:
    return [c.strip() for c in value.split(',') if c.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='nilsection',
        description="2-nilpotent section obstruction for real curves",
    )
    sub = parser.add_subparsers(dest='command', required=True)

    run_parser = sub.add_parser('run', help="build specs and run checks")
    run_parser.add_argument('specs', nargs='+', metavar='SPEC', help="CurveSpec JSON path or bundled spec name")
    run_parser.add_argument('--checks', type=_parse_checks, default=None,
                            help=f"comma list from {','.join(CHECKS)} (default: all)")
    run_parser.add_argument('--format', choices=FORMATS, default=None)
    run_parser.add_argument('--seed', type=int, default=None, help="seed for sampled property checks")
    run_parser.add_argument('--out', type=Path, default=None, help="directory for the report file")
    verbosity = run_parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')

    corpus_parser = sub.add_parser('corpus', help="write a random CurveSpec corpus")
    corpus_parser.add_argument('--seed', type=int, default=0)
    corpus_parser.add_argument('--size', type=int, default=60)
    corpus_parser.add_argument('--out', type=Path, required=True)

    sub.add_parser('specs', help="list the bundled specs")
    return parser


def _log_level(args: argparse.Namespace) -> str:
    if getattr(args, 'verbose', False):
        return 'DEBUG'
    if getattr(args, 'quiet', False):
        return 'ERROR'
    return default_config()['log_level']


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT_ERROR

    level = _log_level(args)
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format=LOG_FORMAT)

    if args.command == 'specs':
        for name in bundled_specs():
            print(name)
        return EXIT_OK

    if args.command == 'corpus':
        if args.size < 1:
            logger.error(f"--size must be at least 1, got {args.size}")
            return EXIT_INPUT_ERROR
        for path in corpus_generate(args.seed, args.size, args.out):
            print(path)
        return EXIT_OK

    try:
        config = RunConfig.from_dict(args.specs, {
            'checks': args.checks,
            'format': args.format,
            'seed': args.seed,
            'out': args.out,
            'log_level': level,
        })
    except UsageError as e:
        logger.error(str(e))
        print(f"nilsection: error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return run(config)


if __name__ == '__main__':
    sys.exit(main())
