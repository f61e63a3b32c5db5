#  Copyright (c) 2021.  Atlas of Living Australia
#   All Rights Reserved.
#
#   The contents of this file are subject to the Mozilla Public
#   License Version 1.1 (the "License"); you may not use this file
#   except in compliance with the License. You may obtain a copy of
#   the License at http://www.mozilla.org/MPL/
#
#   Software distributed under the License is distributed on an "AS  IS" basis,
#   WITHOUT WARRANTY OF ANY KIND, either express or
#   implied. See the License for the specific language governing
#   rights and limitations under the License.

import argparse
import glob
import logging
import os.path
import sys

from cells.schema import CellPartitionSchema
from cells.voronoi import verify_cells, voronoi_cells
from chabauty.metric import epsilon_net, rho
from delone.schema import DeloneSetSchema, ScheduleSchema
from delone.sets import greedy_delone
from experiment.config import load_config
from experiment.suite import run_suite
from field.sections import norm_profile, section
from gram.frame import frame, gram, isometry
from pou.partition import build_pou, verify_pou
from pou.schema import PartitionSchema
from processing.node import ProcessingException
from processing.store import load, save
from roe.maps import alpha, beta
from roe.operators import FinitePropOperator, GridOperator
from roe.schema import OperatorSchema

logger = logging.getLogger('roelab')

def _point(text: str):
    return [float(v) for v in text.split(',')]


def parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Desk experiments on Delone sets, partitions of unity and Roe algebras')
    parser.add_argument('-d', '--directory', type=str, help='Base directory', default='.')
    parser.add_argument('-o', '--output', type=str,
                        help='Output directory (if relative, then relative to the base directory)', default='output')
    parser.add_argument('-w', '--work', type=str,
                        help='Work directory (if relative, then relative to the base directory)', default='work')
    parser.add_argument('-c', '--config', type=str, help='Experiment configuration document', default=None)
    parser.add_argument('-v', '--verbose', help='Verbose logging', action='store_true', default=False)
    parser.add_argument('-x', '--clear', help='Clear the work directory before execution', action='store_true',
                        default=False)
    commands = parser.add_subparsers(dest='command', required=True)

    delone = commands.add_parser('delone', help='Greedy Delone sets')
    delone.add_argument('action', choices=['gen', 'run'])
    delone.add_argument('--target-r', type=float, help='Covering radius to reach')
    delone.add_argument('--seed', type=_point, help='First point, comma separated coordinates', default=None)
    delone.add_argument('--out', type=str, help='Delone set file to write', default='delone.json')

    chabauty = commands.add_parser('chabauty', help='Distances between Delone sets and epsilon nets')
    chabauty.add_argument('action', choices=['rho', 'net', 'run'])
    chabauty.add_argument('--a', type=str, help='First Delone set file')
    chabauty.add_argument('--b', type=str, help='Second Delone set file, the whole space if absent', default=None)
    chabauty.add_argument('--eps', type=float, help='Net radius')
    chabauty.add_argument('--candidates', type=str, help='Directory of candidate Delone set files')

    pou = commands.add_parser('pou', help='Partitions of unity')
    pou.add_argument('action', choices=['build', 'run'])
    pou.add_argument('--delone', type=str, help='Delone set file')
    pou.add_argument('--out', type=str, help='Partition file to write', default='pou.json')

    gram_command = commands.add_parser('gram', help='Gram matrices of partitions')
    gram_command.add_argument('action', choices=['build', 'run'])
    gram_command.add_argument('--pou', type=str, help='Partition file')
    gram_command.add_argument('--dump', type=str, help='Operator file for the Gram matrix', default=None)

    cells = commands.add_parser('cells', help='Voronoi cells')
    cells.add_argument('action', choices=['build', 'run'])
    cells.add_argument('--delone', type=str, help='Delone set file')
    cells.add_argument('--out', type=str, help='Cell file to write', default='cells.json')

    roe = commands.add_parser('roe', help='Compression maps and operator experiments')
    roe.add_argument('action', choices=['alpha', 'beta', 'defect', 'norms'])
    roe.add_argument('--op', type=str, help='Operator file')
    roe.add_argument('--pou', type=str, help='Partition file')
    roe.add_argument('--out', type=str, help='Operator file to write', default='operator.json')

    field = commands.add_parser('field', help='Norm profiles of field sections')
    field.add_argument('action', choices=['run'])
    field.add_argument('--schedule', type=str, help='Schedule file of Delone sets',
                       default=None)
    field.add_argument('--op', type=str, help='Grid operator file for the section', default=None)

    commands.add_parser('suite', help='Run every experiment')
    return parser


def _require(args, *names):
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        raise ValueError(f"{args.command} {args.action} needs --{', --'.join(n.replace('_', '-') for n in missing)}")


def _frame(file: str):
    P = load(PartitionSchema(), file)
    return isometry(P, gram(P.space, P))


def delone_gen(args, config) -> bool:
    _require(args, 'target_r')
    D = greedy_delone(config.space, args.target_r, args.seed)
    save(DeloneSetSchema(), D, args.out)
    print(f"{args.out}: {D.size} points, r(D) = {D.r_pack!r}, R(D) = {D.R_cover!r}")
    return True


def chabauty_rho(args, config) -> bool:
    _require(args, 'a')
    A = load(DeloneSetSchema(), args.a)
    space = A.space
    B = space.nodes if args.b is None else load(DeloneSetSchema(), args.b)
    result = rho(space, A, B)
    print(f"rho = {result.value!r} ({result.direction}, witness {list(result.witness)}, capped {result.capped})")
    return True


def chabauty_net(args, config) -> bool:
    _require(args, 'eps', 'candidates')
    files = sorted(glob.glob(os.path.join(args.candidates, '*.json')))
    if not files:
        raise ValueError(f"No candidate files in {args.candidates}")
    candidates = [load(DeloneSetSchema(), file) for file in files]
    net = epsilon_net(candidates[0].space, args.eps, candidates)
    for file, coverage in zip(files, net.coverage):
        print(f"{os.path.basename(file)}: element {coverage.net_index}, distance {coverage.distance!r}")
    print(f"{len(net.members)} net elements from a base of {len(net.base)} points")
    return net.covered


def pou_build(args, config) -> bool:
    _require(args, 'delone')
    D = load(DeloneSetSchema(), args.delone)
    P = build_pou(D.space, D)
    save(PartitionSchema(), P, args.out)
    report = verify_pou(P)
    for violation in report.violations():
        logger.warning(violation)
    print(f"{args.out}: {P.sites} sites, r = {P.r!r}, R = {P.R!r}, Lebesgue number {report.lebesgue!r}")
    return report.passed


def gram_build(args, config) -> bool:
    _require(args, 'pou')
    P = load(PartitionSchema(), args.pou)
    G = gram(P.space, P, config.tolerances.gram_floor)
    print(f"lambda_min = {G.lambda_min!r}, lower bound {G.lower_bound!r}, cond(G) = {G.condition!r}")
    if args.dump is not None:
        save(OperatorSchema(), FinitePropOperator.create(P.delone, G.G), args.dump)
    tol = config.tolerances.gram_bound
    return G.lambda_min >= G.lower_bound - tol and G.norm <= G.upper_bound + tol


def cells_build(args, config) -> bool:
    _require(args, 'delone')
    D = load(DeloneSetSchema(), args.delone)
    C = voronoi_cells(D.space, D)
    save(CellPartitionSchema(), C, args.out)
    print("u,m_u")
    for u, size in enumerate(C.sizes):
        print(f"{u},{size}")
    return verify_cells(C).passed


def roe_alpha(args, config) -> bool:
    _require(args, 'op', 'pou')
    I = _frame(args.pou)
    T = load(OperatorSchema(), args.op)
    if not isinstance(T, FinitePropOperator):
        raise ValueError(f"{args.op} is not an operator on sites")
    S = alpha(I, T)
    save(OperatorSchema(), S, args.out)
    print(f"||alpha(T)|| = {S.norm()!r}, ||T|| = {T.norm()!r}")
    return True


def roe_beta(args, config) -> bool:
    _require(args, 'op', 'pou')
    I = _frame(args.pou)
    S = load(OperatorSchema(), args.op)
    if not isinstance(S, GridOperator):
        raise ValueError(f"{args.op} is not an operator on the grid")
    T = beta(I, S)
    save(OperatorSchema(), T, args.out)
    print(f"||beta(S)|| = {T.norm()!r}, ||S|| = {S.norm()!r}")
    return True


ACTIONS = {
    ('delone', 'gen'): delone_gen,
    ('chabauty', 'rho'): chabauty_rho,
    ('chabauty', 'net'): chabauty_net,
    ('pou', 'build'): pou_build,
    ('gram', 'build'): gram_build,
    ('cells', 'build'): cells_build,
    ('roe', 'alpha'): roe_alpha,
    ('roe', 'beta'): roe_beta
}


def field_profile(args, config) -> bool:
    _require(args, 'schedule', 'op')
    levels = load(ScheduleSchema(), args.schedule)
    S = load(OperatorSchema(), args.op)
    if not isinstance(S, GridOperator):
        raise ValueError(f"{args.op} is not an operator on the grid")
    if S.space != levels[0].space:
        raise ValueError(f"Operator on {S.space}, schedule on {levels[0].space}")
    profile = norm_profile(section(S, [frame(S.space, D) for D in levels]), config.tolerances.contraction)
    print("t,fiber_norm,continuity_gap")
    for row in profile.rows:
        print(f"{row.t},{row.fiber_norm!r},{row.continuity_gap!r}")
    return profile.contraction


def _command(args):
    """The single computation an invocation names, None for an experiment group"""
    if args.command == 'field' and (args.schedule is not None or args.op is not None):
        return field_profile
    return ACTIONS.get((args.command, getattr(args, 'action', None)))


def main(argv=None) -> int:
    """
    Run a command.

    :param argv: The arguments, the command line if None

    :return: 0 if every check passed, 1 if a check failed, 2 on an error
    """
    args = parser().parse_args(argv)
    base_dir = args.directory
    output_dir = os.path.join(base_dir, args.output)
    work_dir = os.path.join(base_dir, args.work)
    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=log_level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    try:
        config = load_config(args.config)
        command = _command(args)
        if command is not None:
            return 0 if command(args, config) else 1
        targets = None if args.command == 'suite' else [args.command]
        report = run_suite(config, output_dir, work_dir, targets, log_level, args.clear)
    except (ProcessingException, ValueError, OSError) as err:
        logger.error(str(err))
        return 2
    for check in report.failures:
        logger.warning("Failed %s.%s%s: %s against %s", check['stage'], check['check'],
                       '' if check['n'] is None else f" at level {check['n']}", check['value'], check['bound'])
    print(f"{report.summary}: {len(report.checks)} checks, {len(report.failures)} failed")
    return 0 if report.passed else 1


if __name__ == '__main__':
    sys.exit(main())
