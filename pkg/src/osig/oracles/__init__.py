"""Independent reference solutions used to check the solvers."""
from .beer_quiche import BeerQuiche
from .brute_force import brute_force_mask, brute_force_value, convex_envelope, tree_reach
from .hexner import (FOOTBALL, HexnerStateless, RiccatiSolution, critical_time, football_riccati,
                     football_stateless, riccati_integrate)
