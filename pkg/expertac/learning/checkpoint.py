# -*- coding: utf-8 -*-
r"""
A versioned flat-array file format for network parameters and optimizer
state.

A checkpoint is a short text header followed by a binary payload::

    expertac-checkpoint 1
    kind=policy
    seed=0
    step=12
    tensor=hidden0.weight:64x400
    tensor=hidden0.bias:64
    ...
    end

The payload holds the tensors in header order, each flattened in row-major
order as little-endian 64-bit floats. Reading checks that the payload has
exactly the announced length, so truncated or padded files are rejected.

EXAMPLES::

    >>> import numpy as np, os, tempfile
    >>> from expertac.learning.checkpoint import write_checkpoint, read_checkpoint
    >>> path = os.path.join(tempfile.mkdtemp(), 'x.ckpt')
    >>> write_checkpoint(path, 'demo', {'step': 3}, [('w', np.eye(2))])
    >>> kind, meta, tensors = read_checkpoint(path)
    >>> kind, meta['step'], tensors['w'].tolist()
    ('demo', '3', [[1.0, 0.0], [0.0, 1.0]])
"""
######################################################################
#  This file is part of expertac.
#
#        Copyright (C) 2026 The expertac developers
#
#  expertac is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 2 of the License, or
#  (at your option) any later version.
#
#  expertac is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with expertac. If not, see <https://www.gnu.org/licenses/>.
######################################################################
import os

import numpy as np

from expertac.errors import CheckpointError

MAGIC = b'expertac-checkpoint'
FORMAT_VERSION = 1

_DTYPE = np.dtype('<f8')


def _shape_to_string(shape):
    return 'x'.join(str(n) for n in shape) if shape else '1'


def _shape_from_string(text):
    try:
        shape = tuple(int(n) for n in text.split('x'))
    except ValueError:
        raise CheckpointError("invalid tensor shape {!r}".format(text))
    if any(n < 0 for n in shape):
        raise CheckpointError("invalid tensor shape {!r}".format(text))
    return shape


def write_checkpoint(path, kind, meta, tensors):
    r"""
    Write ``tensors`` (a sequence of ``(name, array)`` pairs) with the
    ``key=value`` pairs of ``meta`` to ``path``.

    The file is written next to its destination and then renamed, so a reader
    never sees a partially written checkpoint.
    """
    header = [MAGIC + b' ' + str(FORMAT_VERSION).encode()]
    header.append('kind={}'.format(kind).encode())
    for key in sorted(meta):
        value = str(meta[key])
        if '\n' in value or '=' in key:
            raise ValueError("invalid metadata {!r}={!r}".format(key, value))
        header.append('{}={}'.format(key, value).encode())
    payload = []
    for name, array in tensors:
        if ':' in name or '\n' in name:
            raise ValueError("invalid tensor name {!r}".format(name))
        array = np.asarray(array, dtype=np.float64)
        header.append('tensor={}:{}'.format(name, _shape_to_string(array.shape)).encode())
        payload.append(np.ascontiguousarray(array, dtype=_DTYPE).tobytes())
    header.append(b'end')

    tmp = '{}.tmp{}'.format(path, os.getpid())
    with open(tmp, 'wb') as f:
        f.write(b'\n'.join(header) + b'\n')
        for chunk in payload:
            f.write(chunk)
    os.replace(tmp, path)


def read_checkpoint(path, kind=None):
    r"""
    Return ``(kind, meta, tensors)`` read from ``path``.

    ``meta`` maps keys to the strings stored in the header; ``tensors`` is a
    dictionary in file order. If ``kind`` is given the file must be of that
    kind.
    """
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise CheckpointError("cannot read checkpoint {}: {}".format(path, e))

    lines = []
    pos = 0
    while True:
        end = data.find(b'\n', pos)
        if end < 0:
            raise CheckpointError("{}: unterminated header".format(path))
        line = data[pos:end]
        pos = end + 1
        if line == b'end':
            break
        lines.append(line)

    if not lines or lines[0] != MAGIC + b' ' + str(FORMAT_VERSION).encode():
        raise CheckpointError("{}: not an expertac checkpoint of version {}".format(path, FORMAT_VERSION))

    file_kind = None
    meta = {}
    layout = []
    for line in lines[1:]:
        try:
            key, eq, value = line.decode('ascii').partition('=')
        except UnicodeDecodeError:
            raise CheckpointError("{}: invalid header line".format(path))
        if not eq:
            raise CheckpointError("{}: invalid header line {!r}".format(path, line))
        if key == 'kind':
            file_kind = value
        elif key == 'tensor':
            name, _, shape = value.rpartition(':')
            layout.append((name, _shape_from_string(shape)))
        else:
            meta[key] = value
    if kind is not None and file_kind != kind:
        raise CheckpointError("{}: expected a {!r} checkpoint, found {!r}".format(path, kind, file_kind))

    expected = sum(int(np.prod(shape)) for _, shape in layout) * _DTYPE.itemsize
    if len(data) - pos != expected:
        raise CheckpointError("{}: payload has {} bytes, header announces {}".format(
            path, len(data) - pos, expected))

    tensors = {}
    for name, shape in layout:
        count = int(np.prod(shape))
        array = np.frombuffer(data, dtype=_DTYPE, count=count, offset=pos).astype(np.float64)
        tensors[name] = array.reshape(shape)
        pos += count * _DTYPE.itemsize
    return file_kind, meta, tensors
