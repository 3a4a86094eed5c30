"""Time-expanded amplitude simulation of a hardware schedule.

Amplitudes live on (device port, slot) cells; each slot applies the devices'
configured matrices in wiring order and routes the results along delay-line
edges, honoring switch states.  Running all N logical inputs at once yields
the induced N x N transformation, which must match the plan reconstruction.

Slot collisions (two pulses in one cell), pulses hitting a closed switch,
pulses reaching an unconfigured device, and pulses that never exit all abort
with diagnostics: each indicates a scheduler bug, not a data error.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .core import ComplexMatrix, UnitaryMatrix, unitarity_error
from .schedule import Edge, LogicalModeMap, TimedSchedule, materialize_setting


class ScheduleReplayError(RuntimeError):
    """Base class for simulation failures (always a scheduler bug)."""


class SlotCollisionError(ScheduleReplayError):
    pass


class RoutingError(ScheduleReplayError):
    pass


class UnterminatedPulseError(ScheduleReplayError):
    pass


def _edge_active(edge: Edge, states, depart_slot: int, arrive_slot: int) -> bool:
    if edge.switch is not None:
        sid, want = edge.switch
        if states.get(depart_slot, {}).get(sid) != want:
            return False
    if edge.arrive_switch is not None:
        sid, want = edge.arrive_switch
        if states.get(arrive_slot, {}).get(sid) != want:
            return False
    return True


def simulate_timebins(schedule: TimedSchedule) -> tuple[UnitaryMatrix, LogicalModeMap]:
    """Replay ``schedule`` and return the induced logical-mode unitary.

    The returned matrix is already expressed in logical-mode order on both
    sides (the schedule's mode map has been applied), so it compares directly
    against the plan reconstruction.
    """
    n = schedule.n_logical
    ports = {d.id: d.ports for d in schedule.devices}

    settings: dict[tuple[str, int], ComplexMatrix | None] = {}
    states: dict[int, dict[str, str]] = {}
    for step in schedule.steps:
        for dev, setting in step.settings.items():
            settings[(dev, step.time_bin)] = materialize_setting(setting)
        if step.switches:
            states[step.time_bin] = dict(step.switches)

    edges_by_src: dict[tuple[str, int], list[Edge]] = defaultdict(list)
    for e in schedule.edges:
        edges_by_src[e.src].append(e)

    # arrivals[slot][device][port] = amplitude row over the N logical inputs
    arrivals: dict[int, dict[str, dict[int, np.ndarray]]] = {}

    def put(t: int, ddev: str, dport: int, row: np.ndarray) -> None:
        cell = arrivals.setdefault(t, {}).setdefault(ddev, {})
        if dport in cell:
            raise SlotCollisionError(f"two pulses routed to {ddev}:{dport} at slot {t}")
        cell[dport] = row

    for (dev, port), slot, mode in schedule.mode_map.inputs:
        row = np.zeros(n, dtype=np.complex128)
        row[mode - 1] = 1.0
        put(slot, dev, port, row)

    collected: dict[tuple[int, int], np.ndarray] = {}
    max_delay = max((e.delay for e in schedule.edges), default=0)
    horizon = max(s.time_bin for s in schedule.steps) + max_delay + 1

    def route(dev: str, port: int, slot: int, row: np.ndarray) -> None:
        candidates = edges_by_src.get((dev, port), [])
        active = [e for e in candidates
                  if _edge_active(e, states, slot, slot + e.delay)]
        if len(active) != 1:
            what = "no open path" if not active else "ambiguous paths"
            raise RoutingError(
                f"{what} from {dev}:{port} at slot {slot} "
                f"({len(candidates)} edges declared)")
        e = active[0]
        t = slot + e.delay
        if e.dst[0] == "out":
            key = (e.dst[1], t)
            if key in collected:
                raise SlotCollisionError(f"two pulses exit rail {key[0]} at slot {t}")
            collected[key] = row
        else:
            put(t, e.dst[0], e.dst[1], row)

    missing_setting = object()
    for slot in range(0, horizon + 1):
        # fire devices in wiring order; zero-delay links feed later devices
        # within the same slot
        for dev in schedule.fire_order:
            slot_map = arrivals.get(slot)
            cell = slot_map.pop(dev, None) if slot_map else None
            if not cell:
                continue
            matrix = settings.get((dev, slot), missing_setting)
            if matrix is missing_setting:
                worst = max(float(np.linalg.norm(v)) for v in cell.values())
                raise UnterminatedPulseError(
                    f"pulse at {dev} slot {slot} but no setting defined "
                    f"(norm {worst:.3e})")
            p = ports[dev]
            block = np.zeros((p, n), dtype=np.complex128)
            for port, row in cell.items():
                block[port - 1] = row
            out = block if matrix is None else matrix @ block
            for port in range(1, p + 1):
                row = out[port - 1]
                if not row.any():
                    continue
                route(dev, port, slot, row)
        stale = arrivals.pop(slot, None)
        if stale and any(cell for cell in stale.values()):
            raise UnterminatedPulseError(
                f"pulses stranded at slot {slot}: "
                f"{[(d, sorted(c)) for d, c in stale.items() if c]}")

    leftovers = [
        (slot, dev, port, float(np.linalg.norm(row)))
        for slot, devs in arrivals.items()
        for dev, cell in devs.items()
        for port, row in cell.items()
    ]
    if leftovers:
        raise UnterminatedPulseError(f"pulses still in flight past horizon: {leftovers}")

    out_map = {(p[1], slot): mode for p, slot, mode in schedule.mode_map.outputs}
    result = np.zeros((n, n), dtype=np.complex128)
    seen = set()
    for (rail, slot), row in collected.items():
        mode = out_map.get((rail, slot))
        if mode is None:
            if np.linalg.norm(row) > 1e-9:
                raise UnterminatedPulseError(
                    f"pulse exited rail {rail} at slot {slot} outside the mode map")
            continue
        result[mode - 1] = row * np.exp(1j * schedule.output_phases[mode - 1])
        seen.add(mode)
    missing = set(range(1, n + 1)) - seen
    if missing:
        raise UnterminatedPulseError(f"logical modes never emitted: {sorted(missing)}")

    err = unitarity_error(result)
    if err > 1e-10 * max(1.0, n):
        raise ScheduleReplayError(f"simulated transformation not unitary: {err:.3e}")
    return UnitaryMatrix(result), schedule.mode_map
