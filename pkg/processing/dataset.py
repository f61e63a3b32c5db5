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
import uuid
from typing import Dict, List

import attr
from marshmallow import Schema

from processing import fields


class Record:
    pass

class Port:
    pass

@attr.s(eq=False)
class Record:
    """
    A row of a dataset.

    Record data can be accessed via dot notation, so
    v.KEY will look up the data dictionary and return the value.
    """
    line: int = attr.ib(default=0)
    data: Dict[str, object] = attr.ib(factory=dict)
    issues: str = attr.ib(default=None)

    @classmethod
    def of(cls, line: int, **data):
        return Record(line, data)

    def __getattr__(self, item):
        """
        Get an attribute from the underlying data.
        Missing attributes return None rather than throw an exception.

        :param item: The attribute key
        :return: The result, or None for not found
        """
        if item.startswith('__'):
            raise AttributeError(item)
        return self.data.get(item)


class ArtifactSchema(Schema):
    """In-memory results handed between stages, indexed by schedule level"""
    n = fields.Integer()
    item = fields.Raw()


@attr.s
class Port:
    """A named connection between an output of one node and the inputs of others"""
    id: str = attr.ib(kw_only=True)
    roles: List[str] = attr.ib(factory=list, kw_only=True)
    schema: Schema = attr.ib()

    @id.default
    def _default_id(self):
        return str(uuid.uuid4())

    @classmethod
    def port(cls, schema: Schema, **kwargs):
        """
        Create a port

        :param schema: The schema to use
        :return: A suitable port
        """
        return Port(schema, **kwargs)

    @classmethod
    def artifact(cls, **kwargs):
        """A port carrying computed objects rather than table rows"""
        return Port(ArtifactSchema(), **kwargs)

    @property
    def is_artifact(self) -> bool:
        return isinstance(self.schema, ArtifactSchema)

    def field_names(self) -> List[str]:
        return list(self.schema.fields.keys())


@attr.s
class Dataset:
    schema: Schema = attr.ib()
    rows: List[Record] = attr.ib(factory=list)

    @classmethod
    def for_port(cls, port: Port):
        """
        Construct a dataset corresponding to a specific port

        :param port: The port
        :return: A dataset corresponding to the port
        """
        return Dataset(port.schema)

    def add(self, row: Record):
        self.rows.append(row)

    def add_item(self, n: int, item):
        self.rows.append(Record.of(n, n=n, item=item))

    def items(self) -> List[object]:
        """The artifacts of the dataset in schedule order"""
        return [row.data['item'] for row in sorted(self.rows, key=lambda row: row.line)]
