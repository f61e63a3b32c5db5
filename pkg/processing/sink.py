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

import csv
import json
import os
from collections import OrderedDict
from typing import Dict, List

import attr

from processing.dataset import Port, Record
from processing.node import Node, ProcessingContext


@attr.s()
class Sink(Node):
    input: Port = attr.ib()
    fieldnames: List[str] = attr.ib(default=None, kw_only=True)

    def __attrs_post_init__(self):
        super().__attrs_post_init__()
        if self.fieldnames is None:
            self.fieldnames = self.input.field_names()  # Keep order

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        inputs['input'] = self.input
        return inputs

    def build_data(self, record: Record, line: int = None):
        """
        Build the output data from a record, serialising each column through the schema field.

        :param record: The record to format
        :param line: An optional line number column

        :return: The resulting formatted dictionary
        """
        fields = self.input.schema.fields
        data = OrderedDict()
        if line is not None:
            data['#'] = str(line)
        for name in self.fieldnames:
            value = record.data.get(name)
            data[name] = '' if value is None else fields[name]._serialize(value, name, record.data)
        return data

    def fileName(self):
        """
        Get the file name associated with this sink, if any.

        :return: The file name. By default, returns "unknown"
        """
        return "unknown"

    def vertex_color(self, context: ProcessingContext):
        return 'lightblue'

@attr.s
class CsvSink(Sink):
    file: os.path = attr.ib()
    dialect: str = attr.ib(default='lab')
    work: bool = attr.ib(default=False)

    @classmethod
    def create(cls, id: str, input: Port, file: os.path, dialect: str = 'lab', work: bool = False, **kwargs):
        return CsvSink(id, input, file, dialect, work, **kwargs)

    def execute(self, context: ProcessingContext):
         dataset = context.acquire(self.input)
         file = context.locate_output_file(self.file, self.work)
         self.logger.info(f"Writing to {file}")
         with open(file, "w", newline='') as ofile:
            writer = csv.DictWriter(ofile, self.fieldnames, dialect=self.dialect)
            writer.writeheader()
            for row in dataset.rows:
                writer.writerow(self.build_data(row))
                self.count(self.ROW_COUNT)

    def report(self, context: ProcessingContext):
        self.logger.info("%d rows written to %s", self.counts.get(self.ROW_COUNT, 0), self.file)

    def fileName(self):
        """
        Get the file associated with this sink.

        :return: The relative file path
        """
        return self.file


@attr.s
class SummarySink(Node):
    """
    Collect the check ports of every stage into one JSON summary.

    The summary carries the provenance of the run and no timestamps, so reruns are identical.
    """
    _inputs: List[Port] = attr.ib()
    file: str = attr.ib()
    provenance: Dict[str, object] = attr.ib(factory=dict)

    @classmethod
    def create(cls, id: str, inputs: List[Port], file: str, provenance: Dict[str, object], **kwargs):
        return SummarySink(id, list(inputs), file, provenance, **kwargs)

    def inputs(self) -> Dict[str, Port]:
        inputs = super().inputs()
        for index, input in enumerate(self._inputs):
            inputs[str(index)] = input
        return inputs

    def collect(self, context: ProcessingContext) -> List[Dict[str, object]]:
        rows = []
        for port in self._inputs:
            fields = port.schema.fields
            for record in context.acquire(port).rows:
                rows.append({name: None if record.data.get(name) is None
                            else field._serialize(record.data[name], name, record.data)
                             for name, field in fields.items()})
        return rows

    def execute(self, context: ProcessingContext):
        checks = self.collect(context)
        for check in checks:
            self.count({'pass': self.PASSED_COUNT, 'fail': self.FAILED_COUNT}.get(check['status'], self.SKIPPED_COUNT))
        summary = OrderedDict(self.provenance)
        summary['passed'] = self.counts.get(self.PASSED_COUNT, 0)
        summary['failed'] = self.counts.get(self.FAILED_COUNT, 0)
        summary['skipped'] = self.counts.get(self.SKIPPED_COUNT, 0)
        summary['ok'] = summary['failed'] == 0
        summary['checks'] = checks
        file = context.locate_output_file(self.file)
        self.logger.info(f"Writing summary to {file}")
        with open(file, "w") as ofile:
            json.dump(summary, ofile, indent=2, allow_nan=True)
            ofile.write("\n")

    def fileName(self):
        return self.file

    def vertex_color(self, context: ProcessingContext):
        return 'lightblue'
