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
Save and load documents as JSON through marshmallow schemas.
"""

import json
import logging
import os

from marshmallow import Schema, ValidationError

from processing.node import ProcessingException

logger = logging.getLogger(__name__)


class StoreException(ProcessingException):
    """A document that cannot be read, with the location of the problem"""
    def __init__(self, message: str, file: str = None, offset: int = None, path: str = None):
        super().__init__(message)
        self.file = file
        self.offset = offset
        self.path = path


def _field_path(messages, prefix: str = '') -> str:
    """The first field path in a nested marshmallow error dictionary"""
    if isinstance(messages, dict) and messages:
        key = next(iter(messages))
        return _field_path(messages[key], prefix + ('.' if prefix else '') + str(key))
    return prefix


def dumps(schema: Schema, obj) -> str:
    return json.dumps(schema.dump(obj), allow_nan=True)


def loads(schema: Schema, text: str, file: str = None):
    """
    Read a document from text.

    :param schema: The document schema
    :param text: The JSON text
    :param file: The file name to report in errors

    :return: The loaded object
    """
    name = file or '<text>'
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        offset = len(text[:err.pos].encode('utf-8'))
        raise StoreException(f"Malformed document {name} at byte {offset}: {err.msg}", file, offset=offset) from err
    try:
        return schema.load(data)
    except ValidationError as err:
        path = _field_path(err.messages)
        raise StoreException(f"Invalid document {name} at {path}: {err.messages}", file, path=path) from err
    except ValueError as err:
        raise StoreException(f"Invalid document {name}: {err}", file) from err


def save(schema: Schema, obj, file: str):
    """Write an object as a JSON document"""
    directory = os.path.dirname(file)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(file, "w") as ofile:
        ofile.write(dumps(schema, obj))
        ofile.write("\n")
    logger.debug("Saved %s", file)


def load(schema: Schema, file: str):
    """Read an object from a JSON document"""
    with open(file, "r", encoding="utf-8") as ifile:
        return loads(schema, ifile.read(), file)
