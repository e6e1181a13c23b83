"""Oracle comparison checks shared by the `verify` subcommand and the test-suite."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .convex import lower_hull_1d, second_differences, vex_error_bound
from .core import as_belief
from .dual import dual_solve, init_dual
from .games import beer_quiche_game, corridor_game, hexner_stateless_game, random_corridor_game
from .oracles.beer_quiche import BeerQuiche
from .oracles.brute_force import brute_force_mask, brute_force_value, interpolation_slack
from .oracles.hexner import football_riccati, football_stateless, critical_time
from .primal import minimax, solve, stage_payoffs
from .reach import compute_masks
from .sim import monte_carlo
from .strategy import PlayerOne, PlayerTwo

BQ_P0 = (1.0 / 3.0, 2.0 / 3.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict
    tolerance: dict
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def line(self) -> str:
        meas = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        tol = ", ".join(f"{k}={_short(v)}" for k, v in self.tolerance.items())
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {meas} | limits: {tol} | {self.seconds:.2f}s"


def _short(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.4g}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _timed(fn: Callable[[], CheckResult], limit: Optional[float] = None) -> CheckResult:
    t0 = time.perf_counter()
    res = fn()
    res.seconds = time.perf_counter() - t0
    if limit is not None:
        res.tolerance["seconds"] = limit
        if res.seconds >= limit:
            res.passed = False
            res.notes.append("runtime limit exceeded")
    return res


# ----------------------------------------------------------------------------
# beer-quiche


def check_beer_quiche(tol: float = 1e-9) -> CheckResult:
    """Root value, belief split and P1's type-conditional meal choice."""
    def run():
        spec = beer_quiche_game()
        table = solve(spec)
        v = -table.value(0, [0, 0], BQ_P0)            # back to the P1-maximizer convention
        dec = PlayerOne(table).decide(0, [0, 0], BQ_P0)
        meals = {float(a[0]): j for j, a in enumerate(dec.actions)}
        b, q = meals.get(1.0), meals.get(-1.0)
        ok_shape = b is not None and q is not None
        pr_b_t = dec.probs[b, 0] if ok_shape else np.nan
        pr_q_w = dec.probs[q, 1] if ok_shape else np.nan
        verts = sorted(dec.posteriors[:, 0]) if ok_shape else [np.nan]
        errs = dict(value=abs(v + 1.0 / 6.0),
                    weights=float(np.max(np.abs(np.sort(dec.weights) - 0.5))) if ok_shape else np.inf,
                    vertices=float(np.max(np.abs(np.array(verts) - [0.0, 2.0 / 3.0]))) if ok_shape else np.inf,
                    pr_B_given_T=abs(pr_b_t - 1.0), pr_Q_given_W=abs(pr_q_w - 0.75))
        return CheckResult("beer-quiche exactness", all(e <= tol for e in errs.values()),
                           dict(V=v, **{f"err_{k}": e for k, e in errs.items()}), dict(err=tol))
    return _timed(run, 1.0)


def check_beer_quiche_dual(tol: float = 1e-9) -> CheckResult:
    """init_dual at the prior and P2's replies after each meal."""
    def run():
        spec = beer_quiche_game()
        table = solve(spec)
        conj = dual_solve(spec, table.mask)
        ph = init_dual(table, [0, 0], BQ_P0)
        err_ph = float(np.max(np.abs(-ph - [1.5, -1.0])))       # convention adapter
        two = PlayerTwo(conj)
        after_b = two.decide(1, [1.0, 0.0], ph)
        after_q = two.decide(1, [-1.0, 0.0], ph)

        def bully_prob(dec):
            return float(sum(w for a, w in zip(dec.actions[:, 0], dec.weights) if a == 1.0))
        pb, pq = bully_prob(after_b), bully_prob(after_q)
        errs = dict(ph=err_ph, after_B=abs(pb - 0.5), after_Q=abs(pq - 1.0))
        return CheckResult("beer-quiche dual", all(e <= tol for e in errs.values()),
                           dict(ph_maximizer=(-ph).tolist(), bully_after_B=pb, bully_after_Q=pq,
                                **{f"err_{k}": e for k, e in errs.items()}), dict(err=tol))
    return _timed(run, 1.0)


# ----------------------------------------------------------------------------
# Hexner


def check_critical_time(resolution: float = 1e-3) -> CheckResult:
    def run():
        s1, s2 = football_riccati(resolution)
        tr = critical_time(s1.d, s2.d, s1.times)
        err = abs(tr - 0.4)
        return CheckResult("Hexner critical time", err <= resolution + 1e-12,
                           dict(t_r=tr, err=err), dict(err=resolution))
    return _timed(run, 5.0)


def check_hexner_convergence(steps=(10, 20, 40), action_count: int = 101,
                             belief_count: int = 101) -> CheckResult:
    """Solver value against 4p(1-p) D_tilde(t_k) on every grid point, for several L."""
    def run():
        H, d1, d2 = football_stateless()
        D0 = abs(H.D_tilde(0.0))
        errs, first_split = [], {}
        for L in steps:
            spec = hexner_stateless_game(d1, d2, steps=L, action_count=action_count,
                                         belief_count=belief_count)
            table = solve(spec)
            p = table.beliefs.p
            ref = np.array([4 * p * (1 - p) * H.D_tilde(t) for t in spec.grid.times])
            errs.append(float(np.max(np.abs(table.values[:, 0, :] - ref))))
            one = PlayerOne(table)
            split_at = L
            for k in range(L):
                if one.decide(k, np.zeros(0), spec.prior).m > 1:
                    split_at = k
                    break
            first_split[L] = split_at
        k_r = {L: int(np.floor(H.reveal_time * L / H.T + 1e-9)) for L in steps}
        mono = all(a > b for a, b in zip(errs, errs[1:]))
        final = errs[-1] / D0
        ok = mono and final <= 0.05 and all(first_split[L] == k_r[L] for L in steps)
        return CheckResult("Hexner stateless convergence", ok,
                           dict(max_err=errs, rel_err_final=final, first_split=list(first_split.values()),
                                step_of_t_r=list(k_r.values())),
                           dict(rel_err_final=0.05, monotone="decreasing"))
    return _timed(run, 30.0)


# ----------------------------------------------------------------------------
# brute force and reachability


def state_lipschitz(table) -> float:
    """Largest finite-difference slope in x between feasible neighbouring nodes."""
    lat, out = table.spec.lattice, 0.0
    for k in range(table.values.shape[0]):
        V = table.values[k].reshape(lat.counts + (-1,))
        F = table.mask.feasible[k].reshape(lat.counts)
        for ax in range(lat.dim):
            n = lat.counts[ax]
            a = [slice(None)] * lat.dim
            b = [slice(None)] * lat.dim
            a[ax], b[ax] = slice(1, n), slice(0, n - 1)
            both = F[tuple(a)] & F[tuple(b)]
            if both.any():
                d = np.abs(V[tuple(a)] - V[tuple(b)])[both] / lat.spacing[ax]
                out = max(out, float(d.max()))
    return out


def check_brute_force(n_games: int = 20, seed: int = 0) -> CheckResult:
    """Root values of random corridor games against the exhaustive tree oracle."""
    def run():
        rng = np.random.default_rng(seed)
        worst_ratio, fails, rows = 0.0, 0, []
        for _ in range(n_games):
            spec = random_corridor_game(rng)
            table = solve(spec)
            live = np.flatnonzero(table.mask.feasible[0])
            x0 = spec.lattice.nodes[rng.choice(live)]
            bf = brute_force_value(spec, x0)
            p = table.beliefs.p
            solver = table.values[0, spec.lattice.nearest(x0)]
            err = float(np.max(np.abs(solver - np.interp(p, bf.p, bf.root))))
            slack = interpolation_slack(spec, bf) * state_lipschitz(table) * spec.L
            bound = vex_error_bound(table.beliefs.spacing, bf.lipschitz) * spec.L + slack
            rows.append((err, bound))
            fails += err > bound + 1e-12
            worst_ratio = max(worst_ratio, err / bound if bound > 0 else 0.0)
        return CheckResult("brute-force equivalence", fails == 0,
                           dict(games=n_games, failures=fails, max_err=max(r[0] for r in rows),
                                worst_err_over_bound=worst_ratio),
                           dict(err="2*d_P*L_value*L + state slack"))
    return _timed(run, 120.0)


def check_reach(n_games: int = 10, seed: int = 1) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        mism = 0
        for _ in range(n_games):
            spec = random_corridor_game(rng, belief_count=3)
            mism += int(np.sum(compute_masks(spec).feasible != brute_force_mask(spec)))
        return CheckResult("reachability oracle", mism == 0, dict(instances=n_games, mismatches=mism),
                           dict(mismatches=0))
    return _timed(run, 30.0)


# ----------------------------------------------------------------------------
# convexification refinement


def random_lipschitz(rng: np.random.Generator):
    """A random smooth function on [0, 1] and a Lipschitz constant for it."""
    n = int(rng.integers(2, 6))
    a, w = rng.normal(size=n), rng.uniform(1.0, 12.0, size=n)
    ph = rng.uniform(0.0, 2 * np.pi, size=n)

    def f(p):
        return (a[:, None] * np.sin(w[:, None] * np.asarray(p, float)[None] + ph[:, None])).sum(0)
    return f, float(np.abs(a * w).sum())


def check_refinement(n_functions: int = 50, coarse: int = 21, seed: int = 0) -> CheckResult:
    """Halving d_P at least halves the mean hull error against a 10x finer reference."""
    def run():
        rng = np.random.default_rng(seed)
        fine = 10 * 2 * (coarse - 1) + 1
        ref_p = np.linspace(0.0, 1.0, fine)
        errs, bound_ok = [], True
        for _ in range(n_functions):
            f, L = random_lipschitz(rng)
            ref = lower_hull_1d(ref_p, f(ref_p))(ref_p)
            row = []
            for n in (coarse, 2 * coarse - 1):
                p = np.linspace(0.0, 1.0, n)
                e = float(np.max(np.abs(lower_hull_1d(p, f(p))(ref_p) - ref)))
                bound_ok &= e <= vex_error_bound(1.0 / (n - 1), L)
                row.append(e)
            errs.append(row)
        E = np.array(errs).mean(axis=0)
        ratio = E[0] / E[1] if E[1] > 0 else np.inf
        return CheckResult("convexification refinement", bool(ratio >= 2.0 and bound_ok),
                           dict(mean_err=E.tolist(), ratio=ratio, within_2dL=bool(bound_ok)),
                           dict(ratio=2.0))
    return _timed(run, 10.0)


# ----------------------------------------------------------------------------
# rollouts


def check_martingale(n_runs: int = 10_000) -> CheckResult:
    def run():
        spec = beer_quiche_game()
        table = solve(spec)
        conj = dual_solve(spec, table.mask)
        out, recs = monte_carlo(spec, table, conj, [0, 0], n_runs)
        inc = float(np.mean([r.beliefs[1][0] - r.beliefs[0][0] for r in recs]))
        mean = -out["mean_payoff"]                   # P1-maximizer convention
        se = out["se_payoff"]
        lim_inc = 4 * np.sqrt(0.25 / n_runs)
        ok = abs(inc) <= lim_inc and abs(mean + 1.0 / 6.0) <= 3 * se
        return CheckResult("martingale and payoff", ok,
                           dict(belief_increment=inc, mean_payoff=mean, se=se,
                                payoff_dev_in_se=abs(mean + 1.0 / 6.0) / se),
                           dict(belief_increment=lim_inc, payoff_dev_in_se=3.0))
    return _timed(run, 10.0)


# ----------------------------------------------------------------------------
# structural properties


def dual_second_differences(values: np.ndarray, counts) -> float:
    """Smallest second difference along both axes and both diagonals of a p-hat grid."""
    Z = np.asarray(values).reshape(counts)
    d = [Z[2:] - 2 * Z[1:-1] + Z[:-2], Z[:, 2:] - 2 * Z[:, 1:-1] + Z[:, :-2],
         Z[2:, 2:] - 2 * Z[1:-1, 1:-1] + Z[:-2, :-2], Z[2:, :-2] - 2 * Z[1:-1, 1:-1] + Z[:-2, 2:]]
    return float(min(x.min() for x in d))


def complete_information_gap(table) -> float:
    """Largest gap at p in {0, 1} against a hull-free single-type backup."""
    spec = table.spec
    ends = np.array([[1.0, 0.0], [0.0, 1.0]])
    mask = table.mask
    V = np.where(mask.feasible[spec.L][:, None], spec.terminal_payoffs(spec.lattice.nodes), spec.K)
    gap = float(np.max(np.abs(V - table.values[spec.L][:, [-1, 0]])))
    for k in range(spec.L - 1, -1, -1):
        vals, _ = stage_payoffs(spec, k, V, mask.feasible[k + 1], spec.lattice.nodes, ends)
        val, _, _, _ = minimax(vals)
        V = np.where(mask.feasible[k][:, None], val, spec.K)
        gap = max(gap, float(np.max(np.abs(V - table.values[k][:, [-1, 0]]))))
    return gap


def check_properties(tol: float = 1e-9) -> CheckResult:
    """Convexity after every backup, Fenchel inequality and complete-information reduction."""
    def run():
        spec = corridor_game()
        table = solve(spec)
        conj = dual_solve(spec, table.mask)
        bl, dl = table.beliefs, conj.lattice
        live = [(k, n) for k in range(spec.L + 1) for n in np.flatnonzero(table.mask.feasible[k])]
        conv_p = min(float(np.min(second_differences(table.values[k, n]))) for k, n in live)
        conv_ph = min(dual_second_differences(conj.values[k, n], dl.counts) for k, n in live)
        lip = max(float(np.max(np.abs(np.diff(table.values[k, n])))) / bl.spacing for k, n in live)
        fen_tol = 4 * max(bl.spacing, dl.spacing) * lip
        fen = -np.inf
        for k, n in live:
            direct = np.max(dl.nodes @ bl.beliefs.T - table.values[k, n][None, :], axis=1)
            fen = max(fen, float(np.max(direct - conj.values[k, n])))
        eq = 0.0
        for n in np.flatnonzero(table.mask.feasible[0]):
            x = spec.lattice.nodes[n]
            for p0 in (0.2, 0.5, 0.8):
                p = as_belief([p0, 1 - p0])
                ph = init_dual(table, x, p)
                eq = max(eq, abs(conj.value(0, x, ph) - (ph @ p.weights - table.value(0, x, p))))
        ci = complete_information_gap(table)
        ok = conv_p >= -tol and conv_ph >= -tol and fen <= fen_tol and eq <= fen_tol and ci <= tol
        return CheckResult("property suites", ok,
                           dict(min_second_diff_p=conv_p, min_second_diff_ph=conv_ph,
                                fenchel_violation=fen, fenchel_equality_gap=eq,
                                complete_info_gap=ci),
                           dict(convexity=-tol, fenchel=fen_tol, complete_info=tol))
    return _timed(run)


CHECKS = {
    "beer_quiche": check_beer_quiche,
    "beer_quiche_dual": check_beer_quiche_dual,
    "critical_time": check_critical_time,
    "hexner_convergence": check_hexner_convergence,
    "brute_force": check_brute_force,
    "refinement": check_refinement,
    "martingale": check_martingale,
    "reach": check_reach,
    "properties": check_properties,
}


def run_all(names=None) -> list:
    return [CHECKS[n]() for n in (names or CHECKS)]
