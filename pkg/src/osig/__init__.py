"""Zero-sum differential games with one-sided information and state constraints.

Player 1 knows its type and minimizes; Player 2 sees only the common belief.
Value tables live on a state lattice times a belief lattice, with a dual
(conjugate) table driving Player 2's strategy.
"""
from .core import (ActionSet, Affine, Belief, BeliefLattice, DoubleIntegrator, DualLattice,
                   GameSpec, NumericGuardError, SingleIntegrator, StateLattice, Static, TimeGrid,
                   as_belief, belief_project, dynamics_step)
from .convex import Hull1D, Hull2D, SplitPlan, lower_hull_1d, lower_hull_2d, split_at, vex_error_bound
from .reach import FeasibilityMask, backup_mask, compute_masks, is_feasible
from .primal import ValueTable, backup_step, solve, stage_minimax, terminal_value
from .dual import (ConjugateTable, dual_backup_step, dual_solve, dual_stage_minimax, dual_terminal,
                   init_dual)
from .strategy import (BestResponder, P1Decision, P2Decision, PlayerOne, PlayerTwo, bayes_posterior,
                       p1_act, p2_act)
from .sim import TrajectoryRecord, advantage, monte_carlo, reveal_delay, reveal_step, rollout
from .games import beer_quiche_game, corridor_game, hexner_stateless_game, random_corridor_game
from .config import ConfigError, load_spec

__version__ = "0.1.0"
