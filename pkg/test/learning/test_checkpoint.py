# -*- coding: utf-8 -*-
r"""
Test the checkpoint file format.
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

import pytest


def _write(tmp_path):
    import numpy as np
    from expertac.learning.checkpoint import write_checkpoint
    path = str(tmp_path / "x.ckpt")
    write_checkpoint(path, 'demo', {'step': 3, 'name': 'a b'},
                     [('w', np.arange(6.0).reshape(2, 3)), ('b', np.array([0.5, -0.25]))])
    return path


def test_round_trip(tmp_path):
    import numpy as np
    from expertac.learning.checkpoint import read_checkpoint
    kind, meta, tensors = read_checkpoint(_write(tmp_path), kind='demo')
    assert kind == 'demo'
    assert meta == {'name': 'a b', 'step': '3'}
    assert list(tensors) == ['w', 'b']
    assert np.array_equal(tensors['w'], np.arange(6.0).reshape(2, 3))
    assert tensors['b'].tolist() == [0.5, -0.25]


def test_wrong_kind(tmp_path):
    from expertac.errors import CheckpointError
    from expertac.learning.checkpoint import read_checkpoint
    with pytest.raises(CheckpointError, match="expected a 'policy' checkpoint, found 'demo'"):
        read_checkpoint(_write(tmp_path), kind='policy')


@pytest.mark.parametrize("cut", [1, 8])
def test_truncated(tmp_path, cut):
    from expertac.errors import CheckpointError
    from expertac.learning.checkpoint import read_checkpoint
    path = _write(tmp_path)
    with open(path, 'rb') as f:
        data = f.read()
    with open(path, 'wb') as f:
        f.write(data[:-cut])
    with pytest.raises(CheckpointError, match="payload has"):
        read_checkpoint(path)


def test_padded(tmp_path):
    from expertac.errors import CheckpointError
    from expertac.learning.checkpoint import read_checkpoint
    path = _write(tmp_path)
    with open(path, 'ab') as f:
        f.write(b'\0')
    with pytest.raises(CheckpointError, match="payload has 65 bytes, header announces 64"):
        read_checkpoint(path)


def test_not_a_checkpoint(tmp_path):
    from expertac.errors import CheckpointError
    from expertac.learning.checkpoint import read_checkpoint
    path = tmp_path / "x.ckpt"
    path.write_bytes(b"something else\nend\n")
    with pytest.raises(CheckpointError, match="not an expertac checkpoint"):
        read_checkpoint(str(path))
    path.write_bytes(b"expertac-checkpoint 1\nkind=demo\n")
    with pytest.raises(CheckpointError, match="unterminated header"):
        read_checkpoint(str(path))
    with pytest.raises(CheckpointError, match="cannot read checkpoint"):
        read_checkpoint(str(tmp_path / "missing.ckpt"))


def test_invalid_names(tmp_path):
    import numpy as np
    from expertac.learning.checkpoint import write_checkpoint
    with pytest.raises(ValueError, match="invalid tensor name"):
        write_checkpoint(str(tmp_path / "x.ckpt"), 'demo', {}, [('a:b', np.zeros(1))])
    with pytest.raises(ValueError, match="invalid metadata"):
        write_checkpoint(str(tmp_path / "x.ckpt"), 'demo', {'k': 'a\nb'}, [])


def test_policy_checkpoint_of_other_kind(tmp_path):
    from expertac.errors import CheckpointError
    from expertac.learning.policy import load_checkpoint
    with pytest.raises(CheckpointError, match="expected a 'policy' checkpoint"):
        load_checkpoint(_write(tmp_path))
