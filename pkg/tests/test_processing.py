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

import json
from typing import Dict

import attr
import pytest
from marshmallow import Schema

from processing import fields
from processing.dataset import Dataset, Port, Record
from processing.node import ProcessingContext, ProcessingException
from processing.orchestrate import Orchestrator
from processing.sink import CsvSink, SummarySink
from processing.transform import FAIL, PASS, SKIP, Stage, decreasing


class HalvingSchema(Schema):
    n = fields.Integer()
    value = fields.Real()

    class Meta:
        ordered = True


@attr.s
class HalvingStage(Stage):
    table: Port = attr.ib()

    @classmethod
    def create(cls, id: str, **kwargs):
        return HalvingStage(id, Port.port(HalvingSchema()), **kwargs)

    def outputs(self) -> Dict[str, Port]:
        outputs = super().outputs()
        outputs['table'] = self.table
        return outputs

    def compute(self, context: ProcessingContext):
        rows = [{'n': n, 'value': 0.5 ** n} for n in (1, 2, 3)]
        self.check('halves', decreasing([row['value'] for row in rows], strict=True), rows[-1]['value'], 0.5)
        self.check('too_small', rows[-1]['value'] > 0.5, rows[-1]['value'], 0.5, n=3)
        self.skip('later', "nothing to compare")
        context.save(self.table, self.tabulate(self.table, rows))


@attr.s
class BrokenStage(Stage):
    def compute(self, context: ProcessingContext):
        raise RuntimeError("boom")


@attr.s
class ReadingStage(Stage):
    input: Port = attr.ib()

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['input'] = self.input
        return inputs

    def compute(self, context: ProcessingContext):
        pass


def context_for(tmp_path):
    return ProcessingContext.create('test', output_dir=str(tmp_path), work_dir=str(tmp_path / 'work'))


def test_record_lookup():
    record = Record.of(3, n=2, value=0.25)
    assert record.line == 3
    assert record.value == 0.25
    assert record.missing is None


def test_artifacts_in_level_order():
    dataset = Dataset.for_port(Port.artifact())
    dataset.add_item(2, 'second')
    dataset.add_item(1, 'first')
    assert dataset.items() == ['first', 'second']
    assert Port.artifact().is_artifact
    assert not Port.port(HalvingSchema()).is_artifact


def test_decreasing():
    assert decreasing([3.0, 2.0, 2.0])
    assert not decreasing([3.0, 2.0, 2.0], strict=True)
    assert decreasing([1.0, 1.0 + 1e-9], slack=1e-8)
    assert decreasing([])


def test_stage_checks_and_tables(tmp_path):
    with Orchestrator('test') as orchestrator:
        stage = HalvingStage.create('halving')
        CsvSink.create('halving_output', stage.table, 'halving.csv')
        SummarySink.create('summary', [stage.check_port], 'summary.json', {'experiment': 'test'})
    assert len(orchestrator.nodes) == 3
    context = context_for(tmp_path)
    orchestrator.run(context)
    checks = context.acquire(stage.check_port)
    assert [row.status for row in checks.rows] == [PASS, FAIL, SKIP]
    assert [row.check for row in checks.rows] == ['halves', 'too_small', 'later']
    assert context.failures(stage) == 1
    assert (tmp_path / 'halving.csv').read_text() == "n,value\n1,0.5\n2,0.25\n3,0.125\n"
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['experiment'] == 'test'
    assert (summary['passed'], summary['failed'], summary['skipped']) == (1, 1, 1)
    assert not summary['ok']
    assert summary['checks'][1] == {'stage': 'halving', 'check': 'too_small', 'n': 3, 'status': FAIL,
                                    'value': 0.125, 'bound': 0.5, 'detail': None}
    assert (tmp_path / 'work' / 'test_graph.dot').exists()


def test_failing_stage_is_named(tmp_path):
    with Orchestrator('test') as orchestrator:
        BrokenStage('broken')
    with pytest.raises(ProcessingException, match="Stage broken failed: boom"):
        orchestrator.run(context_for(tmp_path))


def test_dangling_input(tmp_path):
    with Orchestrator('test') as orchestrator:
        ReadingStage('reading', Port.port(HalvingSchema()))
    with pytest.raises(ProcessingException, match="Dangling"):
        orchestrator.run(context_for(tmp_path))


def test_duplicate_node():
    orchestrator = Orchestrator('test')
    stage = HalvingStage.create('halving')
    orchestrator.add(stage)
    with pytest.raises(ValueError):
        orchestrator.add(stage)


def test_dataset_saved_once(tmp_path):
    context = context_for(tmp_path)
    port = Port.port(HalvingSchema())
    context.save(port, Dataset.for_port(port))
    with pytest.raises(ValueError):
        context.save(port, Dataset.for_port(port))
    with pytest.raises(ProcessingException):
        context.acquire(Port.artifact())
