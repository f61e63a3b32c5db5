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

"""
The experiment suite: every stage in dependency order, tables to CSV and the checks to a JSON summary.
"""

import json
import logging
import os
from typing import Dict, Iterable, List, Set

import attr

from cells.transform import CellStage
from chabauty.transform import ConvergenceStage, MetricStage, NetStage
from delone.transform import ScheduleStage
from experiment.config import ExperimentConfig
from field.transform import FieldStage
from gram.transform import GramStage, StrongStage
from pou.transform import PartitionStage
from processing.node import ProcessingContext
from processing.orchestrate import Orchestrator
from processing.sink import CsvSink, SummarySink
from processing.transform import FAIL, Stage
from roe.transform import IsometryStage, NormStage, ProductStage, ReconstructionStage
from space.transform import GeometryStage

logger = logging.getLogger(__name__)

SUMMARY = 'summary.json'

# Each experiment group with the groups it reads from
REQUIRES = {
    'space': [],
    'delone': ['space'],
    'chabauty': ['delone'],
    'pou': ['delone'],
    'gram': ['pou'],
    'cells': ['gram'],
    'roe': ['cells'],
    'field': ['cells']
}
GROUPS = tuple(REQUIRES.keys())


def closure(targets: Iterable[str] = None) -> Set[str]:
    """The requested groups with everything they depend on, all groups if None"""
    if targets is None:
        return set(GROUPS)
    selected = set()
    pending = list(targets)
    while pending:
        group = pending.pop()
        if group not in REQUIRES:
            raise ValueError(f"Unknown experiment group {group}, expected one of {', '.join(GROUPS)}")
        if group not in selected:
            selected.add(group)
            pending.extend(REQUIRES[group])
    return selected


def suite(config: ExperimentConfig, targets: Iterable[str] = None) -> Orchestrator:
    """
    Build the orchestrator for the selected experiment groups.

    :param config: The experiment configuration
    :param targets: The groups to run, with their dependencies; all groups if None

    :return: The orchestrator, with a CSV sink per table and the summary sink
    """
    groups = closure(targets)
    stages: List[Stage] = []
    provenance = {'experiment': config.experiment, 'digest': config.digest(), 'seed': config.seed,
                  'groups': [group for group in GROUPS if group in groups]}
    with Orchestrator(config.experiment) as orchestrator:
        geometry = GeometryStage.create('geometry')
        CsvSink.create('geometry_output', geometry.geometry, 'geometry.csv')
        stages.append(geometry)
        space = geometry.space
        if 'delone' in groups:
            schedule = ScheduleStage.create('schedule', space)
            CsvSink.create('schedule_output', schedule.table, 'levels.csv')
            CsvSink.create('ball_count_output', schedule.geometry, 'ball_counts.csv')
            stages.append(schedule)
        if 'chabauty' in groups:
            convergence = ConvergenceStage.create('convergence', space, schedule.levels)
            CsvSink.create('convergence_output', convergence.table, 'convergence.csv')
            metric = MetricStage.create('metric', space)
            net = NetStage.create('net', space)
            CsvSink.create('net_output', net.coverage, 'coverage.csv')
            stages.extend([convergence, metric, net])
        if 'pou' in groups:
            partition = PartitionStage.create('partition', space, schedule.levels)
            CsvSink.create('partition_output', partition.table, 'pou.csv')
            stages.append(partition)
        if 'gram' in groups:
            gram = GramStage.create('gram', space, partition.partitions)
            CsvSink.create('gram_output', gram.table, 'gram.csv')
            strong = StrongStage.create('strong', space, gram.frames)
            CsvSink.create('strong_output', strong.table, 'strong.csv')
            stages.extend([gram, strong])
        if 'cells' in groups:
            cells = CellStage.create('cells', space, schedule.coarse, gram.frames)
            CsvSink.create('cell_level_output', cells.levels, 'cell_levels.csv')
            CsvSink.create('cell_dims_output', cells.dims, 'cell_dims.csv')
            CsvSink.create('boundary_output', cells.boundary, 'boundary.csv')
            CsvSink.create('cell_projection_output', cells.projections, 'cell_projection.csv')
            stages.append(cells)
        if 'roe' in groups:
            isometry = IsometryStage.create('isometry', space, gram.frames)
            CsvSink.create('isometry_output', isometry.table, 'isometry.csv')
            defect = ReconstructionStage.create('defect', space, gram.frames, cells.cells, cells.rank)
            CsvSink.create('defect_output', defect.table, 'defect.csv')
            product = ProductStage.create('product', space, gram.frames, cells.cells, cells.rank)
            CsvSink.create('product_output', product.table, 'product.csv')
            norms = NormStage.create('norms', space, gram.frames, cells.cells, cells.rank)
            CsvSink.create('norm_output', norms.table, 'norms.csv')
            stages.extend([isometry, defect, product, norms])
        if 'field' in groups:
            field = FieldStage.create('field', space, gram.frames, cells.cells, cells.rank)
            CsvSink.create('field_output', field.table, 'field_profile.csv')
            stages.append(field)
        SummarySink.create('summary', [stage.check_port for stage in stages], SUMMARY, provenance)
    return orchestrator


@attr.s
class Report:
    """The outcome of a run: provenance, every check and the files written"""
    experiment: str = attr.ib()
    digest: str = attr.ib()
    seed: int = attr.ib()
    checks: List[Dict[str, object]] = attr.ib()
    tables: List[str] = attr.ib()
    summary: str = attr.ib()

    @property
    def failures(self) -> List[Dict[str, object]]:
        return [check for check in self.checks if check['status'] == FAIL]

    @property
    def passed(self) -> bool:
        return not self.failures


def run_suite(config: ExperimentConfig, output_dir: str, work_dir: str = None, targets: Iterable[str] = None,
              log_level: int = logging.INFO, clear: bool = True) -> Report:
    """
    Run the experiment suite.

    :param config: The experiment configuration
    :param output_dir: The directory for tables and the summary
    :param work_dir: The directory for the stage graph, a temporary directory if None
    :param targets: The experiment groups to run
    :param log_level: The node logging level
    :param clear: Clear the work directory first

    :return: The report read back from the summary
    """
    orchestrator = suite(config, targets)
    kwargs = {} if work_dir is None else {'work_dir': work_dir}
    context = ProcessingContext.create(config.experiment, config=config, output_dir=output_dir, log_level=log_level,
                                       clear_work_dir=clear, **kwargs)
    orchestrator.run(context)
    tables = [node.fileName() for node in orchestrator.nodes if isinstance(node, CsvSink)]
    summary = os.path.join(output_dir, SUMMARY)
    with open(summary, "r", encoding="utf-8") as ifile:
        document = json.load(ifile)
    report = Report(config.experiment, config.digest(), config.seed, document['checks'], tables, summary)
    logger.info("%s: %d checks, %d failed", report.experiment, len(report.checks), len(report.failures))
    return report
