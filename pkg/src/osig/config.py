"""JSON game configurations: schema validation and GameSpec construction."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import jsonschema
import numpy as np

from . import games
from .core import (ActionSet, Affine, DoubleIntegrator, GameSpec, SingleIntegrator, StateLattice,
                   Static, TimeGrid, belief_project, no_constraint)

_num = {"type": "number"}
_vec = {"type": "array", "items": _num}
_mat = {"type": "array", "items": _vec}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_action_list = {
    "oneOf": [
        {"type": "array", "minItems": 1, "items": {"oneOf": [_num, _vec]}},
        _obj({"range": _pair, "count": {"type": "integer", "minimum": 1}}, ["range", "count"]),
    ]
}

SCHEMA = _obj({
    "comments": {"type": "string"},
    "name": {"type": "string"},
    "dynamics": _obj({
        "family": {"enum": ["single_integrator", "double_integrator", "affine", "static"]},
        "params": _obj({"u_dim": {"type": "integer", "minimum": 1},
                        "v_dim": {"type": "integer", "minimum": 1},
                        "u_axes": {"type": "integer", "minimum": 1},
                        "v_axes": {"type": "integer", "minimum": 1},
                        "A": _mat, "Bu": _mat, "Bv": _mat}),
    }, ["family"]),
    "actions": _obj({
        "u": _action_list, "v": _action_list,
        "schedule": {"type": "array", "items": _obj({"u": _action_list, "v": _action_list},
                                                    ["u", "v"])},
    }),
    "types": _obj({"count": {"type": "integer", "minimum": 2}, "prior": _vec}, ["count"]),
    "payoffs": _obj({
        "terminal": _obj({
            "kind": {"enum": ["beer_quiche", "hexner_targets", "corridor", "zero"]},
            "params": _obj({"targets": {"type": "array", "items": {"oneOf": [_num, _vec]}},
                            "weights": _pair}),
        }, ["kind"]),
        "instantaneous": _obj({
            "kind": {"enum": ["none", "effort", "hexner_stateless"]},
            "params": _obj({"u_weight": _num, "v_weight": _num,
                            "source": {"enum": ["football", "constant"]},
                            "d1": _num, "d2": _num, "types": _vec,
                            "resolution": {"type": "number", "exclusiveMinimum": 0}}),
        }, ["kind"]),
    }, ["terminal"]),
    "constraint": _obj({"kind": {"enum": ["none", "separation"]},
                        "radius": {"type": "number", "minimum": 0}}, ["kind"]),
    "time": _obj({"horizon": {"type": "number", "exclusiveMinimum": 0},
                  "steps": {"type": "integer", "minimum": 1}}, ["horizon", "steps"]),
    "lattice": _obj({"bounds": {"type": "array", "items": _pair},
                     "counts": {"type": "array", "items": {"type": "integer", "minimum": 2}}},
                    ["bounds", "counts"]),
    "belief_lattice": _obj({"count": {"type": "integer", "minimum": 2}}, ["count"]),
    "caps": _obj({"K": {"type": "number", "exclusiveMinimum": 0}}, ["K"]),
    "dual_lattice": _obj({"bounds": {"type": "array", "items": _pair, "minItems": 2, "maxItems": 2},
                          "counts": {"type": "array", "items": {"type": "integer", "minimum": 2},
                                     "minItems": 2, "maxItems": 2}}, ["bounds", "counts"]),
}, ["dynamics", "types", "payoffs", "time", "caps"])


class ConfigError(ValueError):
    """The configuration does not follow the schema or is inconsistent."""


def validate(cfg: dict):
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config field {where}: {e.message}") from None


def _actions(a) -> np.ndarray:
    if isinstance(a, dict):
        lo, hi = a["range"]
        return np.linspace(lo, hi, a["count"])[:, None]
    return np.asarray([np.atleast_1d(x) for x in a], float)


def _dynamics(d: dict):
    fam, par = d["family"], d.get("params", {})
    allowed = {"single_integrator": {"u_dim", "v_dim"}, "static": {"u_dim", "v_dim"},
               "double_integrator": {"u_axes", "v_axes"}, "affine": {"A", "Bu", "Bv"}}[fam]
    extra = set(par) - allowed
    if extra:
        raise ConfigError(f"config field dynamics/params: {sorted(extra)} not used by {fam}")
    if fam == "single_integrator":
        return SingleIntegrator(par.get("u_dim", 1), par.get("v_dim", 1))
    if fam == "static":
        return Static(par.get("u_dim", 1), par.get("v_dim", 1))
    if fam == "double_integrator":
        return DoubleIntegrator(par.get("u_axes", 1), par.get("v_axes", 1))
    try:
        return Affine(par["A"], par["Bu"], par["Bv"])
    except KeyError as e:
        raise ConfigError(f"config field dynamics/params/{e.args[0]}: required for affine") from None


def _hexner_d(par: dict):
    if par.get("source", "constant") == "football":
        from .oracles.hexner import football_stateless
        _, d1, d2 = football_stateless(par.get("resolution", 2.5e-4))
        return d1, d2
    if "d1" not in par or "d2" not in par:
        raise ConfigError("config field payoffs/instantaneous/params: constant source needs d1 and d2")
    c1, c2 = float(par["d1"]), float(par["d2"])
    return (lambda t: c1 + 0.0 * np.asarray(t, float)), (lambda t: c2 + 0.0 * np.asarray(t, float))


def build_spec(cfg: dict) -> GameSpec:
    """GameSpec from an already-parsed configuration dictionary."""
    validate(cfg)
    dyn = _dynamics(cfg["dynamics"])
    if dyn.dim:
        if "lattice" not in cfg:
            raise ConfigError("config field lattice: required for dynamics with a state")
        b = np.asarray(cfg["lattice"]["bounds"], float).reshape(-1, 2)
        lattice = StateLattice(b[:, 0], b[:, 1], cfg["lattice"]["counts"])
    else:
        lattice = StateLattice([], [], [])
    n_types = cfg["types"]["count"]
    prior = cfg["types"].get("prior")
    if prior is not None and len(prior) != n_types:
        raise ConfigError("config field types/prior: length must equal types/count")

    term = cfg["payoffs"]["terminal"]
    kind, par = term["kind"], term.get("params", {})
    if kind == "beer_quiche":
        terminal = games.beer_quiche_terminal
    elif kind == "zero":
        terminal = lambda X: np.zeros((len(X), n_types))
    else:
        if "targets" not in par or len(par["targets"]) != n_types:
            raise ConfigError("config field payoffs/terminal/params/targets: one target per type")
        terminal = games.target_payoff(par["targets"], dyn.positions,
                                       tuple(par.get("weights", (1.0, 1.0))))

    inst = cfg["payoffs"].get("instantaneous", {"kind": "none"})
    ipar = inst.get("params", {})
    running = None
    if inst["kind"] == "effort":
        running = games.effort_payoff(ipar.get("u_weight", 0.0), ipar.get("v_weight", 0.0))
    elif inst["kind"] == "hexner_stateless":
        d1, d2 = _hexner_d(ipar)
        running = games.hexner_running(d1, d2, ipar.get("types", (-1.0, 1.0)))

    con = cfg.get("constraint", {"kind": "none"})
    if con["kind"] == "separation":
        if "radius" not in con:
            raise ConfigError("config field constraint/radius: required for separation")
        constraint = games.separation_constraint(con["radius"], dyn.positions)
    else:
        constraint = no_constraint

    grid = TimeGrid(cfg["time"]["horizon"], cfg["time"]["steps"])
    acts_cfg = cfg.get("actions", {})
    if "schedule" in acts_cfg:
        if len(acts_cfg["schedule"]) != grid.steps:
            raise ConfigError("config field actions/schedule: need one entry per step")
        actions: Any = [ActionSet(_actions(s["u"]), _actions(s["v"])) for s in acts_cfg["schedule"]]
    elif kind == "beer_quiche" and "u" not in acts_cfg:
        actions = games.beer_quiche_actions()
    else:
        if "u" not in acts_cfg or "v" not in acts_cfg:
            raise ConfigError("config field actions: u and v (or a schedule) are required")
        actions = ActionSet(_actions(acts_cfg["u"]), _actions(acts_cfg["v"]))

    extra = {}
    if "dual_lattice" in cfg:
        extra = dict(dual_bounds=tuple(map(tuple, cfg["dual_lattice"]["bounds"])),
                     dual_counts=tuple(cfg["dual_lattice"]["counts"]))
    try:
        return GameSpec(dynamics=dyn, lattice=lattice, actions=actions, n_types=n_types,
                        terminal=terminal, grid=grid, K=float(cfg["caps"]["K"]), running=running,
                        constraint=constraint,
                        prior=belief_project(prior) if prior is not None else None,
                        belief_count=cfg.get("belief_lattice", {}).get("count", 101),
                        name=cfg.get("name", "game"),
                        info={"radius": con.get("radius"), "config": cfg}, **extra)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def load_spec(path: Union[str, Path]) -> GameSpec:
    """Read a UTF-8 JSON configuration file and build the game."""
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    return build_spec(cfg)
