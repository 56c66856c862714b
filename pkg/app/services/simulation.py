"""
Numerical integration of polynomial vector fields with invariant monitoring
"""
import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.integrate import RK45

from app.config import get_settings
from app.errors import IntegrationError, PolyError, UnknownChannelError
from app.hamiltonian.bihamiltonian import derive_system
from app.hamiltonian.closed_form import ClosedForm, as_mapping
from app.hamiltonian.polyfield import (
    Poly,
    PolyVec3,
    compile_field,
    compile_poly,
    divergence,
    dot,
    grad,
)
from app.hamiltonian.systems import assemble, get_system
from app.models import IntegratorConfig

logger = logging.getLogger(__name__)

Monitor = Union[Poly, ClosedForm]

# trajectory channel -> CSV column
CSV_COLUMNS = {"H": "H", "G": "G", "Gbar": "Gbar", "analytic_divergence": "div", "energy_rate_residual": "energy_rate_residual"}


@dataclass
class Trajectory:
    times: List[float]
    states: List[List[float]]
    channels: Dict[str, List[float]] = field(default_factory=dict)
    diverged: bool = False
    config: Optional[IntegratorConfig] = None

    def channel(self, name: str) -> List[float]:
        if name not in self.channels:
            raise UnknownChannelError(f"unknown channel '{name}'; available: {', '.join(self.channels)}")
        return self.channels[name]


def _rk4_step(fn, t: float, state: np.ndarray, h: float) -> np.ndarray:
    k1 = fn(t, state)
    k2 = fn(t + h / 2, state + h / 2 * k1)
    k3 = fn(t + h / 2, state + h / 2 * k2)
    k4 = fn(t + h, state + h * k3)
    return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _escaped(state: np.ndarray, limit: float) -> bool:
    return not np.all(np.isfinite(state)) or float(np.linalg.norm(state)) > limit


def _integrate_rk4(fn, x0: np.ndarray, cfg: IntegratorConfig, limit: float):
    span = cfg.t_end - cfg.t_start
    steps = max(1, int(math.ceil(span / cfg.step - 1e-9)))
    times, states = [cfg.t_start], [x0]
    state = x0
    for i in range(1, steps + 1):
        t_prev = times[-1]
        t_next = cfg.t_end if i == steps else cfg.t_start + i * cfg.step
        state = _rk4_step(fn, t_prev, state, t_next - t_prev)
        if _escaped(state, limit):
            return times, states, True
        times.append(t_next)
        states.append(state)
    return times, states, False


def _integrate_rk45(fn, x0: np.ndarray, cfg: IntegratorConfig, limit: float):
    solver = RK45(
        fn,
        cfg.t_start,
        x0,
        cfg.t_end,
        first_step=min(cfg.step, cfg.t_end - cfg.t_start),
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
    )
    times, states = [cfg.t_start], [x0]
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            logger.warning(f"Adaptive step failed at t={solver.t}: {message}")
            return times, states, True
        state = np.array(solver.y, dtype=float)
        if _escaped(state, limit):
            return times, states, True
        if solver.t > times[-1]:
            times.append(float(solver.t))
            states.append(state)
    return times, states, False


def integrate(
    rhs: PolyVec3,
    x0: Sequence[float],
    cfg: IntegratorConfig,
    hamiltonian: Optional[Poly] = None,
    monitors: Optional[Mapping[str, Monitor]] = None,
) -> Trajectory:
    """Integrate dx/dt = rhs and record H, the extra monitors, the divergence and the energy-rate residual"""
    if cfg.t_end <= cfg.t_start or cfg.step <= 0:
        raise IntegrationError("integration window must be increasing and the step positive")
    if len(x0) != 3:
        raise IntegrationError("initial state must have three components")
    bindings = dict(cfg.param_bindings)
    try:
        fn = compile_field(rhs, bindings)
        hamiltonian = Poly.zero() if hamiltonian is None else hamiltonian
        h_fn = compile_poly(hamiltonian, bindings)
        rate_fn = compile_poly(dot(grad(hamiltonian), rhs), bindings)
        div_fn = compile_poly(divergence(rhs), bindings)
    except PolyError as e:
        raise IntegrationError(f"cannot evaluate the field: {e}")

    limit = get_settings().divergence_limit
    start = np.array([float(v) for v in x0])
    logger.info(f"Integrating with {cfg.method} on [{cfg.t_start}, {cfg.t_end}], step {cfg.step}")
    if cfg.method == "rk4":
        times, states, diverged = _integrate_rk4(fn, start, cfg, limit)
    elif cfg.method == "rk45":
        times, states, diverged = _integrate_rk45(fn, start, cfg, limit)
    else:
        raise IntegrationError(f"unknown method '{cfg.method}'")
    if diverged:
        logger.warning(f"Trajectory diverged at t={times[-1]} (norm limit {limit:g})")

    channels: Dict[str, List[float]] = {"H": [h_fn(s) for s in states]}
    for name, monitor in (monitors or {}).items():
        if isinstance(monitor, ClosedForm):
            bound = monitor.bind(bindings)
            channels[name] = [bound.evaluate(as_mapping(s)) for s in states]
        else:
            m_fn = compile_poly(monitor, bindings)
            channels[name] = [m_fn(s) for s in states]
    channels["analytic_divergence"] = [div_fn(s) for s in states]
    channels["energy_rate_residual"] = _energy_rate_residual(times, states, channels["H"], rate_fn)

    logger.info(f"Integration finished with {len(times)} samples")
    return Trajectory(
        times=list(times),
        states=[[float(v) for v in s] for s in states],
        channels=channels,
        diverged=diverged,
        config=cfg,
    )


def _energy_rate_residual(times, states, energy, rate_fn) -> List[float]:
    """|dH/dt by second-order finite differences - grad H . rhs| at each sample"""
    if len(times) < 3:
        return [0.0] * len(times)
    numeric = np.gradient(np.array(energy), np.array(times), edge_order=2)
    return [abs(float(n) - rate_fn(s)) for n, s in zip(numeric, states)]


def conservation_report(traj: Trajectory, quantity_name: str) -> float:
    values = traj.channel(quantity_name)
    return max((abs(v - values[0]) for v in values), default=0.0)


def _resolve_bindings(defaults: Mapping[str, object], overrides: Optional[Mapping[str, float]]) -> Dict[str, float]:
    bindings = {name: float(value) for name, value in defaults.items()}
    bindings.update({name: float(value) for name, value in (overrides or {}).items()})
    return bindings


def simulate_system(
    sys_name: str,
    x0: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    params: Optional[Mapping[str, float]] = None,
) -> Trajectory:
    """Integrate a registry entry at its default parameters, overridden by params"""
    sys = get_system(sys_name)
    cfg = cfg or IntegratorConfig()
    bindings = _resolve_bindings(sys.defaults, {**cfg.param_bindings, **(params or {})})
    cfg = cfg.model_copy(update={"param_bindings": bindings})
    monitors: Dict[str, Monitor] = {}
    if sys.name.startswith("euler_rotor"):
        monitors = {"G": sys.H, "Gbar": Poly.symbol("x") ** 2 + Poly.symbol("y") ** 2 + Poly.symbol("z") ** 2}
    return integrate(assemble(sys), x0, cfg, hamiltonian=sys.H, monitors=monitors)


def simulate_derived(
    sys_name: str,
    x0: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    G: Optional[Union[Poly, str]] = None,
    params: Optional[Mapping[str, float]] = None,
    lam: float = 1.0,
) -> Trajectory:
    """Integrate the bi-Hamiltonian system derived from a registry entry"""
    derived = derive_system(sys_name, G=G)
    sys = get_system(sys_name)
    cfg = cfg or IntegratorConfig()
    bindings = _resolve_bindings(sys.defaults, {**cfg.param_bindings, **(params or {})})
    for name, _ in derived.constraint:
        bindings.pop(name, None)
    if isinstance(derived.Gbar, ClosedForm):
        bindings.setdefault("lam", lam)
    cfg = cfg.model_copy(update={"param_bindings": bindings})
    monitors: Dict[str, Monitor] = {"G": derived.G}
    if derived.Gbar is not None:
        monitors["Gbar"] = derived.Gbar
    hamiltonian = sys.H.substitute(dict(derived.constraint))
    return integrate(derived.rhs, x0, cfg, hamiltonian=hamiltonian, monitors=monitors)


def _format_float(value: float) -> str:
    return format(value, ".17g")


def write_csv(traj: Trajectory, path: Union[str, Path]) -> None:
    columns = ["H"] + [name for name in ("G", "Gbar") if name in traj.channels] + [
        "analytic_divergence",
        "energy_rate_residual",
    ]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "x", "y", "z"] + [CSV_COLUMNS[name] for name in columns])
        for i, (t, state) in enumerate(zip(traj.times, traj.states)):
            row = [t, *state] + [traj.channels[name][i] for name in columns]
            writer.writerow([_format_float(v) for v in row])
    logger.info(f"Wrote {len(traj.times)} rows to {path}")


def trajectory_payload(traj: Trajectory) -> dict:
    return {
        "times": traj.times,
        "states": traj.states,
        "channels": traj.channels,
        "config": traj.config.model_dump() if traj.config else {},
    }


def write_json(traj: Trajectory, path: Union[str, Path]) -> None:
    with open(path, "w", newline="\n") as f:
        json.dump(trajectory_payload(traj), f)
    logger.info(f"Wrote trajectory JSON to {path}")
