r"""
expertac: expert-augmented actor-critic with a Kronecker-factored natural
gradient optimizer on deterministic sparse-reward grids.
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
from .version import version as __version__

from .environment import grid_environments, load_grid, parse_grid, EnvSpec, VectorEnv

from .learning.policy import PolicyNet
from .learning.config import TrainConfig
from .learning.trainer import train
from .learning.expert import generate_dataset, load_dataset, save_dataset

from .harness.evaluation import evaluate
