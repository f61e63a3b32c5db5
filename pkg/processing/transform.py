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
from typing import Dict, List

import attr
from marshmallow import Schema

from processing import fields
from processing.dataset import Dataset, Port, Record
from processing.node import Node, ProcessingContext

PASS = 'pass'
FAIL = 'fail'
SKIP = 'skip'


class CheckSchema(Schema):
    """One verified invariant of a stage"""
    stage = fields.String()
    check = fields.String()
    n = fields.Integer()
    status = fields.String()
    value = fields.Real()
    bound = fields.Real()
    detail = fields.String()

    class Meta:
        ordered = True


@attr.s
class Stage(Node):
    """
    An experiment stage.

    Stages read artifacts from earlier stages, compute tables and record every invariant they verify on
    the ``checks`` port. A failed check does not stop the experiment; an exception does.
    """
    check_port: Port = attr.ib(init=False, kw_only=True)

    def __attrs_post_init__(self):
        self.check_port = Port.port(CheckSchema())
        self._checks = None
        super().__attrs_post_init__()

    def checks(self) -> Dict[str, Port]:
        checks = super().checks()
        checks['checks'] = self.check_port
        return checks

    def vertex_color(self, context: ProcessingContext):
        return 'lightgreen'

    @property
    def tolerances(self):
        return self._context.config.tolerances

    def check(self, name: str, passed: bool, value: float = None, bound: float = None, n: int = None,
              detail: str = None) -> bool:
        """
        Record the outcome of a check.

        :param name: The check name
        :param passed: The outcome
        :param value: The measured quantity
        :param bound: The bound it was compared against
        :param n: The schedule level, if the check is per level
        :param detail: Further information

        :return: The outcome
        """
        status = PASS if passed else FAIL
        self._checks.add(Record.of(len(self._checks.rows), stage=self.id, check=name, n=n, status=status,
                                   value=value, bound=bound, detail=detail))
        self.count(self.PASSED_COUNT if passed else self.FAILED_COUNT)
        if not passed:
            self.logger.warning("Check %s failed%s: %s against %s", name, "" if n is None else f" at level {n}",
                                value, bound)
        return bool(passed)

    def skip(self, name: str, reason: str, n: int = None):
        """Record a check that could not be made"""
        self._checks.add(Record.of(len(self._checks.rows), stage=self.id, check=name, n=n, status=SKIP,
                                   detail=reason))
        self.count(self.SKIPPED_COUNT)
        self.logger.info("Skipped %s: %s", name, reason)

    def tabulate(self, port: Port, rows: List[dict]) -> Dataset:
        """Build the dataset for a table port from a list of row dictionaries"""
        dataset = Dataset.for_port(port)
        for line, row in enumerate(rows):
            dataset.add(Record(line, row))
        self.count(self.ROW_COUNT, len(rows))
        return dataset

    def items(self, port: Port) -> List[object]:
        return self._context.acquire(port).items()

    def execute(self, context: ProcessingContext):
        self._context = context
        self._checks = Dataset.for_port(self.check_port)
        self.compute(context)
        context.save(self.check_port, self._checks)

    def compute(self, context: ProcessingContext):
        """
        Run the stage, saving every output port.

        :param context: The processing context
        """
        raise NotImplementedError


def decreasing(values: List[float], strict: bool = False, slack: float = 0.0) -> bool:
    """Is the sequence non-increasing (or strictly decreasing)?"""
    if strict:
        return all(b < a for a, b in zip(values, values[1:]))
    return all(b <= a + slack for a, b in zip(values, values[1:]))

