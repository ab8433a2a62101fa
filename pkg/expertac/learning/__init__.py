r"""
The learner: policy network, rollouts, expert trajectories, the
Kronecker-factored optimizer and the training loop.
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
from .policy import PolicyNet, forward, backward, GradientSet, save_checkpoint, load_checkpoint
from .rollout import RolloutBatch, collect, compute_returns, compute_advantages
from .expert import (ExpertDataset, Trajectory, generate_dataset, plan_expert, save_dataset, load_dataset,
                     sample_batch, expert_advantage, expert_accuracy, bc_train)
from .kfac import FisherState, TrustRegionConfig, precondition, trust_region_step, save_fisher, load_fisher
from .config import TrainConfig
from .trainer import Trainer, train, combined_update
