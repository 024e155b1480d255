"""Named experiment presets.

Each preset pins the parameters of one published figure or table and is a
list of cases, each case a partial config dict. Every preset has a ``-desk``
flavour (30x30 lattice or 900-node small world, shorter runs, fewer seeds,
coarser grids) that finishes in minutes on one core. Sweep and size-sweep
presets exist for both network families (``-ws`` suffix for small world).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Any

from .errors import ConfigError

TRANSITION_PAIRS = ((0.8, 0.5), (0.5, 0.5), (0.5, 0.8))
SNAPSHOT_TIMES = (1, 10, 100, 1000)
SIZES = (400, 900, 1600, 2500)

DESK_SIDE = 30
DESK_N = 900


@dataclass(frozen=True)
class PresetCase:
    label: str
    config: dict[str, Any]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    cases: tuple[PresetCase, ...]

    @property
    def kinds(self) -> set[str]:
        return {c.config.get("kind", "ensemble") for c in self.cases}


def _num(x: float) -> str:
    return f"{x:g}"


def _transition_cases(kind: str, steps: int, tail: int) -> tuple[PresetCase, ...]:
    return tuple(
        PresetCase(
            label=f"p{_num(p)}_q{_num(q)}",
            config={"kind": kind, "steps": steps, "tail": tail,
                    "seeds": {"count": 1}, "params": {"p": p, "q": q}},
        )
        for p, q in TRANSITION_PAIRS
    )


def _sweep(net: str, x: dict, y: dict, params: dict) -> tuple[PresetCase, ...]:
    return (PresetCase(
        label=f"{x['name']}_{y['name']}",
        config={"kind": "sweep2d", "network": {"kind": net}, "axes": [x, y], "params": params},
    ),)


def _axis(name: str, lo: float, hi: float, points: int = 11) -> dict:
    return {"name": name, "min": lo, "max": hi, "points": points}


def _size_cases(net: str) -> tuple[PresetCase, ...]:
    cases = []
    for M, beta in ((5, 0.3), (10, 0.6), (15, 0.9)):
        cases.append(PresetCase(
            label=f"M{M}_beta{_num(beta)}",
            config={"kind": "size-sweep", "network": {"kind": net}, "sizes": list(SIZES),
                    "params": {"M": M, "beta": beta, "p": 1.0, "q": 0.0, "r": 0.5}},
        ))
    for r, p in ((0.2, 0.3), (0.5, 0.6), (0.8, 0.9)):
        cases.append(PresetCase(
            label=f"r{_num(r)}_p{_num(p)}",
            config={"kind": "size-sweep", "network": {"kind": net}, "sizes": list(SIZES),
                    "params": {"r": r, "p": p, "q": 0.5, "beta": 0.6, "M": 10}},
        ))
    return tuple(cases)


def _reference_presets() -> dict[str, Preset]:
    presets = {
        "fig2": Preset("fig2", "learner-count evolution for three (p, q) pairs",
                       _transition_cases("single-run", 5000, 1000)),
        "table1": Preset("table1", "stationary learner/profiteer counts vs theory",
                         _transition_cases("single-run", 5000, 1000)),
        "table2": Preset("table2", "moments of the learner-count distribution (last 4000 steps)",
                         _transition_cases("single-run", 5000, 4000)),
        "fig8": Preset("fig8", "cooperation curves and lattice snapshots, pure profiteers", tuple(
            PresetCase(
                label=f"beta{_num(beta)}_r{_num(r)}",
                config={"kind": "snapshot-run", "seeds": {"count": 1},
                        "snapshot_times": list(SNAPSHOT_TIMES),
                        "params": {"beta": beta, "r": r, "M": 10, "p": 1.0, "q": 0.0}},
            )
            for beta, r in ((0.9, 0.3), (0.9, 0.5), (0.1, 0.5))
        )),
    }
    for net, suffix in (("lattice", ""), ("ws", "-ws")):
        presets[f"fig3{suffix}"] = Preset(
            f"fig3{suffix}", "cooperation over transition probabilities p x q",
            _sweep(net, _axis("p", 0, 1), _axis("q", 0, 1), {"r": 0.6, "beta": 0.5, "M": 5}))
        presets[f"fig4{suffix}"] = Preset(
            f"fig4{suffix}", "cooperation over memory length x decay, mixed population",
            _sweep(net, _axis("M", 1, 20, 20), _axis("beta", 0, 1), {"r": 0.3, "p": 0.5, "q": 0.5}))
        presets[f"fig5{suffix}"] = Preset(
            f"fig5{suffix}", "cooperation over memory length x decay, pure profiteers",
            _sweep(net, _axis("M", 1, 20, 20), _axis("beta", 0, 1), {"r": 0.3, "p": 1.0, "q": 0.0}))
        presets[f"fig6{suffix}"] = Preset(
            f"fig6{suffix}", "cooperation over learning rate x discount factor",
            _sweep(net, _axis("alpha", 0, 1), _axis("gamma", 0, 1),
                   {"r": 0.5, "p": 0.5, "q": 0.5, "beta": 0.5, "M": 5}))
        presets[f"fig7{suffix}"] = Preset(
            f"fig7{suffix}", "cooperation over exploration rate x payoff parameter",
            _sweep(net, _axis("epsilon", 0, 1), _axis("r", 0, 1),
                   {"p": 0.4, "q": 0.8, "beta": 0.5, "M": 5}))
        presets[f"fig9{suffix}"] = Preset(
            f"fig9{suffix}", "cooperation against network size", _size_cases(net))
    return presets


def _desk_case(case: PresetCase) -> PresetCase:
    cfg = copy.deepcopy(case.config)
    kind = cfg.get("kind", "ensemble")
    net = cfg.setdefault("network", {})
    if net.get("kind", "lattice") == "lattice":
        net["side"] = DESK_SIDE
    else:
        net["n"] = DESK_N
    if kind == "sweep2d":
        cfg.update(steps=1000, tail=200, seeds={"count": 2})
        for axis in cfg["axes"]:
            axis["points"] = 3
    elif kind == "size-sweep":
        cfg.update(steps=1000, tail=200, seeds={"count": 2})
    elif kind == "snapshot-run":
        cfg.update(steps=1000, tail=200)
    else:
        cfg["steps"] = min(cfg.get("steps", 5000), 2000)
        cfg["tail"] = min(cfg.get("tail", 500), 1000)
    return PresetCase(label=case.label, config=cfg)


def _build() -> dict[str, Preset]:
    out: dict[str, Preset] = {}
    for name, preset in _reference_presets().items():
        out[name] = preset
        out[f"{name}-desk"] = Preset(
            f"{name}-desk", preset.description + " (desk scale)",
            tuple(_desk_case(c) for c in preset.cases))
    return out


PRESETS: dict[str, Preset] = _build()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
