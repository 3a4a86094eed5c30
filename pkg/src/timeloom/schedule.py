"""Lowering of decomposition plans to per-time-bin hardware schedules.

Two architectures are produced:

* ``elimination``: one universal M-port device V (one tau feedback loop) and
  one specialized (2M-3)-port device W (M-2 loops), chained V -> W, with
  M-1 switched outer delay lines feeding W's outputs back to V's inputs.
* ``cs`` / ``cs_reuse``: universal devices U and V feeding a fixed 2M-port
  coupling stage S; S's cycle-side outputs return to V through M delay
  lines, and M switched outer lines feed exited pulses back to U.  The
  reuse variant folds U and V into a single device firing every half bin,
  paying 2M extra switches.

Schedules are pure data (devices, gated delay-line edges, per-slot settings
and switch states, and explicit logical-mode maps) so they can be serialized
and replayed by the simulator.  Topology depends only on (n, m), never on
matrix values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import ComplexMatrix
from .cosine_sine import CsPlan
from .elimination import (
    EliminationPlan,
    matrix_from_json,
    matrix_to_json,
    rotate_block_rows,
)

PortRef = tuple[str, int]


@dataclass(frozen=True)
class DeviceSpec:
    id: str
    ports: int


@dataclass(frozen=True)
class Edge:
    """Directed optical path.  ``delay`` is in slots.  ``switch`` gates on the
    state at the departure slot, ``arrive_switch`` at the arrival slot."""

    src: PortRef
    dst: PortRef
    delay: int
    kind: str  # "inner" | "outer" | "link" | "exit"
    switch: tuple[str, str] | None = None
    arrive_switch: tuple[str, str] | None = None


@dataclass(frozen=True)
class Setting:
    """Device configuration for one slot: a dense matrix, an angle set for
    the coupling stage, or the identity."""

    kind: str  # "matrix" | "angles" | "identity"
    matrix: ComplexMatrix | None = None
    angles: tuple[float, ...] | None = None


IDENTITY = Setting(kind="identity")


@dataclass(frozen=True)
class TimeStep:
    time_bin: int  # slot index; bins equal slots unless slots_per_bin == 2
    settings: Mapping[str, Setting]
    switches: Mapping[str, str]


@dataclass(frozen=True)
class LogicalModeMap:
    """Bijections between (port, slot) events and logical modes, 1-based."""

    inputs: tuple[tuple[PortRef, int, int], ...]
    outputs: tuple[tuple[PortRef, int, int], ...]


@dataclass(frozen=True)
class TimedSchedule:
    architecture: str  # "elimination" | "cs" | "cs_reuse" (+ "_chain")
    m: int
    n_logical: int
    n_original: int
    pulse_period: float
    slots_per_bin: int
    devices: tuple[DeviceSpec, ...]
    fire_order: tuple[str, ...]
    edges: tuple[Edge, ...]
    switch_ids: tuple[str, ...]
    mode_map: LogicalModeMap
    output_phases: tuple[float, ...]
    steps: tuple[TimeStep, ...]

    @property
    def total_slots(self) -> int:
        return max(s.time_bin for s in self.steps) + 1

    @property
    def total_bins(self) -> int:
        return -(-self.total_slots // self.slots_per_bin)

    @property
    def outer_loop_delay(self) -> int:
        """Delay of the switched feedback lines, in pulse periods."""
        outer = [e.delay for e in self.edges if e.kind == "outer"]
        return max(outer) // self.slots_per_bin if outer else 0


def coupling_stage_matrix(theta_prime: Iterable[float]) -> ComplexMatrix:
    """Physical 2M-port coupling stage: rail pair (i, M+i) sees

        [[sin t', cos t'], [-cos t', sin t']]

    so the complement angle t' is the straight-through transmissivity and
    t' = pi/2 passes both rail groups unchanged (the boundary setting)."""
    tp = list(theta_prime)
    m = len(tp)
    out = np.eye(2 * m, dtype=np.complex128)
    for i, t in enumerate(tp):
        st, ct = math.sin(t), math.cos(t)
        out[i, i] = st
        out[i, m + i] = ct
        out[m + i, i] = -ct
        out[m + i, m + i] = st
    return out


def materialize_setting(s: Setting) -> ComplexMatrix | None:
    if s.kind == "identity":
        return None
    if s.kind == "matrix":
        return s.matrix
    if s.kind == "angles":
        return coupling_stage_matrix(s.angles)
    raise ValueError(f"unknown setting kind {s.kind!r}")


class _StepAccumulator:
    """Collects per-slot settings/switch states, rejecting double booking."""

    def __init__(self) -> None:
        self.settings: dict[int, dict[str, Setting]] = {}
        self.switches: dict[int, dict[str, str]] = {}

    def set_device(self, slot: int, dev: str, setting: Setting) -> None:
        bucket = self.settings.setdefault(slot, {})
        if dev in bucket:
            raise ValueError(f"device {dev} double-booked at slot {slot}")
        bucket[dev] = setting

    def set_switches(self, slot: int, ids: Iterable[str], state: str) -> None:
        bucket = self.switches.setdefault(slot, {})
        for sid in ids:
            prev = bucket.get(sid)
            if prev is not None and prev != state:
                raise ValueError(f"switch {sid} set to both {prev} and {state} at slot {slot}")
            bucket[sid] = state

    def steps(self) -> tuple[TimeStep, ...]:
        slots = sorted(set(self.settings) | set(self.switches))
        return tuple(
            TimeStep(
                time_bin=s,
                settings=dict(self.settings.get(s, {})),
                switches=dict(self.switches.get(s, {})),
            )
            for s in slots
        )


# ---------------------------------------------------------------------------
# elimination architecture
# ---------------------------------------------------------------------------


def _rotated_identity(dim: int, shift: int) -> ComplexMatrix:
    return np.roll(np.eye(dim, dtype=np.complex128), -shift, axis=0)


def schedule_elimination(plan: EliminationPlan, chain: bool = False) -> TimedSchedule:
    """Lower an elimination plan onto the V/W block.

    Round r occupies V bins B_r .. B_r+k_r+1 (boundary, k_r blocks, boundary)
    and W bins B_r+2 .. B_r+k_r+2; switched outer lines of k*tau delay close
    the loop so each round's exits arrive exactly when the next round needs
    them.  ``chain`` replicates the block per round instead of looping.
    """
    m, k, np_ = plan.m, plan.k, plan.n_padded
    span = max(2 * m - 3, 1)
    cv = _rotated_identity(m, 1)
    cw = _rotated_identity(span, m - 2) if span > 1 else np.eye(1, dtype=np.complex128)

    v_rot: dict[tuple[int, int], ComplexMatrix] = {}
    for b in plan.v_blocks:
        v_rot[(b.layer, b.index_in_layer)] = rotate_block_rows(b).matrix
    w_rot: dict[tuple[int, int], ComplexMatrix] = {}
    for b in plan.w_blocks:
        w_rot[(b.layer, b.index_in_layer)] = rotate_block_rows(b).matrix

    def vdev(r: int) -> str:
        return f"V{r}" if chain else "V"

    def wdev(r: int) -> str:
        return f"W{r}" if chain else "W"

    def swid(r: int, i: int) -> str:
        return f"sw{r}_{i}" if chain else f"sw{i}"

    devices: list[DeviceSpec] = []
    instances = range(1, k + 1) if chain else range(1, 2)
    for r in instances:
        devices.append(DeviceSpec(vdev(r), m))
        devices.append(DeviceSpec(wdev(r), span))

    outer_delay = 1 if chain else k
    round_starts = [(r - 1) * (3 if chain else k + 2) for r in range(1, k + 1)]

    edges: list[Edge] = []
    switch_ids: list[str] = []
    for r in instances:
        v, w = vdev(r), wdev(r)
        edges.append(Edge((v, m), (v, m), 1, "inner"))
        for i in range(1, m):
            edges.append(Edge((v, i), (w, min(i, span)), 1, "link"))
        for i in range(1, m - 1):
            edges.append(Edge((w, m - 1 + i), (w, m - 1 + i), 1, "inner"))
        switched = k > 1 and (not chain or r < k)
        for i in range(1, m):
            port = min(i, span)
            if switched:
                sid = swid(r, i)
                switch_ids.append(sid)
                edges.append(Edge((w, port), ("out", i), 0, "exit",
                                  switch=(sid, "through")))
                edges.append(Edge((w, port), (vdev(r + 1) if chain else "V", i),
                                  outer_delay, "outer", switch=(sid, "loop")))
            else:
                edges.append(Edge((w, port), ("out", i), 0, "exit"))

    acc = _StepAccumulator()
    for r in range(1, k + 1):
        b0 = round_starts[r - 1]
        kr = k - r + 1
        v, w = vdev(r), wdev(r)
        acc.set_device(b0, v, Setting("matrix", matrix=cv))
        for j in range(1, kr + 1):
            acc.set_device(b0 + j, v, Setting("matrix", matrix=v_rot[(r, j)]))
        acc.set_device(b0 + kr + 1, v, Setting("matrix", matrix=cv))
        acc.set_device(b0 + 2, w, Setting("matrix", matrix=cw))
        for p in range(1, kr):
            acc.set_device(b0 + 2 + p, w, Setting("matrix", matrix=w_rot[(r, p)]))
        acc.set_device(b0 + kr + 2, w, Setting("matrix", matrix=cw))
        ids = [swid(r, i) for i in range(1, m) if swid(r, i) in switch_ids]
        if ids:
            state_mid = "loop" if r < k else "through"
            for t in range(2, kr + 2):
                acc.set_switches(b0 + t, ids, state_mid)
            acc.set_switches(b0 + kr + 2, ids, "through")

    inputs: list[tuple[PortRef, int, int]] = [((vdev(1), 1), 0, np_)]
    for j in range(1, k + 1):
        omega = np_ - j * (m - 1)
        for i in range(1, m):
            inputs.append(((vdev(1), i), j, omega + i - 1))

    outputs: list[tuple[PortRef, int, int]] = []
    for r in range(1, k):
        b0 = round_starts[r - 1]
        kr = k - r + 1
        base = (r - 1) * (m - 1)
        for i in range(1, m):
            outputs.append((("out", i), b0 + kr + 2, base + i))
    b0 = round_starts[k - 1]
    outputs.append((("out", 1), b0 + 2, np_))
    for i in range(1, m):
        outputs.append((("out", i), b0 + 3, np_ - m + i))

    phases = list(plan.phases)
    fire = tuple(d.id for d in devices)
    return TimedSchedule(
        architecture="elimination" + ("_chain" if chain else ""),
        m=m, n_logical=np_, n_original=plan.n,
        pulse_period=1.0, slots_per_bin=1,
        devices=tuple(devices), fire_order=fire,
        edges=tuple(edges), switch_ids=tuple(switch_ids),
        mode_map=LogicalModeMap(inputs=tuple(inputs), outputs=tuple(outputs)),
        output_phases=tuple(phases),
        steps=acc.steps(),
    )


# ---------------------------------------------------------------------------
# cosine-sine architectures
# ---------------------------------------------------------------------------


def schedule_cs(plan: CsPlan, reuse: bool = False, chain: bool = False) -> TimedSchedule:
    """Lower a cosine-sine plan onto {U, V, S} (or {UV, S} when ``reuse``).

    Layer i spans bins B_i .. B_i+ell_i; the coupling stage's first and last
    settings are the unit-transmissivity boundary.  Non-reuse runs at one
    slot per bin; reuse doubles the resolution, the shared device taking the
    fresh-pulse role on even slots and the cycled-pulse role on odd slots.
    """
    if reuse and chain:
        raise ValueError("reuse and chain are mutually exclusive")
    return _schedule_cs_reuse(plan) if reuse else _schedule_cs_plain(plan, chain)


def _layer_blocks(plan: CsPlan, i: int):
    layer = plan.layers[i - 1]
    ell_i = plan.ell - i + 1
    assert len(layer.v_blocks) == ell_i and len(layer.u_blocks) == ell_i - 1
    return layer, ell_i


def _schedule_cs_plain(plan: CsPlan, chain: bool) -> TimedSchedule:
    m, ell, np_ = plan.m, plan.ell, plan.n_padded
    devices: list[DeviceSpec] = []
    edges: list[Edge] = []
    switch_ids: list[str] = []
    acc = _StepAccumulator()

    def udev(i: int) -> str:
        return f"U{i}" if chain else "U"

    def vdev(i: int) -> str:
        return f"V{i}" if chain else "V"

    def sdev(i: int) -> str:
        return f"S{i}" if chain else "S"

    n_inst = ell if chain else 1
    for i in range(1, n_inst + 1):
        devices.append(DeviceSpec(udev(i), m))
        devices.append(DeviceSpec(vdev(i), m))
        devices.append(DeviceSpec(sdev(i), 2 * m))

    outer_delay = 1 if chain else ell
    for i in range(1, n_inst + 1):
        u, v, s = udev(i), vdev(i), sdev(i)
        for r in range(1, m + 1):
            edges.append(Edge((u, r), (s, m + r), 0, "link"))
            edges.append(Edge((v, r), (s, r), 0, "link"))
            edges.append(Edge((s, m + r), (v, r), 1, "inner"))
        for r in range(1, m + 1):
            if (chain and i == ell) or (not chain and ell == 1):
                edges.append(Edge((s, r), ("out", r), 0, "exit"))
                continue
            sid = f"sw{i}_{r}" if chain else f"sw{r}"
            if sid not in switch_ids:
                switch_ids.append(sid)
            edges.append(Edge((s, r), ("out", r), 0, "exit", switch=(sid, "through")))
            edges.append(Edge((s, r), (udev(i + 1) if chain else "U", r),
                              outer_delay, "outer", switch=(sid, "loop")))

    starts = [(i - 1) * (2 if chain else ell + 1) for i in range(1, ell + 1)]
    # the unit-transmissivity boundary passes both rail groups unchanged;
    # use the exact identity so vacuum ports stay exactly dark
    straight = IDENTITY
    for i in range(1, ell + 1):
        layer, ell_i = _layer_blocks(plan, i)
        b0 = starts[i - 1]
        u, v, s = udev(i), vdev(i), sdev(i)
        acc.set_device(b0, u, IDENTITY)
        acc.set_device(b0, s, straight)
        for j in range(1, ell_i):
            acc.set_device(b0 + j, u, Setting("matrix", matrix=layer.u_blocks[j - 1]))
            acc.set_device(b0 + j, v, Setting("matrix", matrix=layer.v_blocks[j - 1]))
            acc.set_device(b0 + j, s,
                           Setting("angles", angles=tuple(layer.cs_sets[j - 1])))
        acc.set_device(b0 + ell_i, v,
                       Setting("matrix", matrix=layer.v_blocks[ell_i - 1]))
        acc.set_device(b0 + ell_i, s, straight)
        ids = ([f"sw{i}_{r}" for r in range(1, m + 1)] if chain
               else [f"sw{r}" for r in range(1, m + 1)])
        ids = [x for x in ids if x in switch_ids]
        if ids:
            for j in range(1, ell_i):
                acc.set_switches(b0 + j, ids, "loop")
            acc.set_switches(b0 + ell_i, ids, "through")
            if not chain:
                acc.set_switches(b0, ids, "loop")

    inputs = [((udev(1), r), j - 1, (j - 1) * m + r)
              for j in range(1, ell + 1) for r in range(1, m + 1)]
    outputs = []
    for i in range(1, ell + 1):
        ell_i = ell - i + 1
        b0 = starts[i - 1]
        for r in range(1, m + 1):
            outputs.append((("out", r), b0 + ell_i, (ell_i - 1) * m + r))

    return TimedSchedule(
        architecture="cs" + ("_chain" if chain else ""),
        m=m, n_logical=np_, n_original=plan.n,
        pulse_period=1.0, slots_per_bin=1,
        devices=tuple(devices), fire_order=tuple(d.id for d in devices),
        edges=tuple(edges), switch_ids=tuple(switch_ids),
        mode_map=LogicalModeMap(inputs=tuple(inputs), outputs=tuple(outputs)),
        output_phases=tuple([0.0] * np_),
        steps=acc.steps(),
    )


def _schedule_cs_reuse(plan: CsPlan) -> TimedSchedule:
    m, ell, np_ = plan.m, plan.ell, plan.n_padded
    devices = [DeviceSpec("UV", m), DeviceSpec("S", 2 * m)]
    edges: list[Edge] = []
    switch_ids: list[str] = []

    swi = [f"swi{r}" for r in range(1, m + 1)]
    swo = [f"swo{r}" for r in range(1, m + 1)]
    swx = [f"sw{r}" for r in range(1, m + 1)]
    switch_ids.extend(swi + swo + swx)

    for r in range(1, m + 1):
        edges.append(Edge(("UV", r), ("S", m + r), 2, "link", switch=(swo[r - 1], "u_path")))
        edges.append(Edge(("UV", r), ("S", r), 1, "link", switch=(swo[r - 1], "v_path")))
        edges.append(Edge(("S", m + r), ("UV", r), 1, "inner",
                          arrive_switch=(swi[r - 1], "loop")))
        edges.append(Edge(("S", r), ("out", r), 0, "exit", switch=(swx[r - 1], "through")))
        edges.append(Edge(("S", r), ("UV", r), 2 * ell, "outer",
                          switch=(swx[r - 1], "loop"),
                          arrive_switch=(swi[r - 1], "fresh")))

    acc = _StepAccumulator()
    straight = IDENTITY
    delta = ell + 2
    for i in range(1, ell + 1):
        layer, ell_i = _layer_blocks(plan, i)
        b0 = (i - 1) * delta
        for t in range(0, ell_i):
            slot = 2 * (b0 + t)
            setting = IDENTITY if t == 0 else Setting("matrix", matrix=layer.u_blocks[t - 1])
            acc.set_device(slot, "UV", setting)
            acc.set_switches(slot, swo, "u_path")
            acc.set_switches(slot, swi, "fresh")
        for t in range(1, ell_i + 1):
            slot = 2 * (b0 + t) + 1
            acc.set_device(slot, "UV", Setting("matrix", matrix=layer.v_blocks[t - 1]))
            acc.set_switches(slot, swo, "v_path")
            acc.set_switches(slot, swi, "loop")
        for t in range(0, ell_i + 1):
            slot = 2 * (b0 + t) + 2
            if t == 0 or t == ell_i:
                acc.set_device(slot, "S", straight)
            else:
                acc.set_device(slot, "S",
                               Setting("angles", angles=tuple(layer.cs_sets[t - 1])))
            acc.set_switches(slot, swx, "through" if t == ell_i else "loop")

    inputs = [(("UV", r), 2 * (j - 1), (j - 1) * m + r)
              for j in range(1, ell + 1) for r in range(1, m + 1)]
    outputs = []
    for i in range(1, ell + 1):
        ell_i = ell - i + 1
        b0 = (i - 1) * delta
        for r in range(1, m + 1):
            outputs.append((("out", r), 2 * (b0 + ell_i) + 2, (ell_i - 1) * m + r))

    return TimedSchedule(
        architecture="cs_reuse",
        m=m, n_logical=np_, n_original=plan.n,
        pulse_period=1.0, slots_per_bin=2,
        devices=tuple(devices), fire_order=("UV", "S"),
        edges=tuple(edges), switch_ids=tuple(switch_ids),
        mode_map=LogicalModeMap(inputs=tuple(inputs), outputs=tuple(outputs)),
        output_phases=tuple([0.0] * np_),
        steps=acc.steps(),
    )


# ---------------------------------------------------------------------------
# inventory
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InventoryReport:
    architecture: str
    n: int
    m: int
    devices: tuple[tuple[str, int, int], ...]  # (id, ports, settings count)
    switch_count: int
    delay_lines_inner: int
    delay_lines_outer: int
    delay_lines_link: int
    total_bins: int
    total_slots: int
    spatial_mesh_elements: int
    temporal_time_estimate_bins: int
    time_ratio_vs_temporal: float

    def lines(self) -> list[str]:
        out = [f"architecture: {self.architecture}  n={self.n} m={self.m}"]
        for did, ports, cnt in self.devices:
            out.append(f"device {did}: {ports} ports, {cnt} settings")
        out.append(f"switches: {self.switch_count}")
        out.append(
            "delay lines: "
            f"{self.delay_lines_inner} inner + {self.delay_lines_outer} outer "
            f"(+ {self.delay_lines_link} inter-device links)"
        )
        out.append(f"time bins: {self.total_bins} (slots: {self.total_slots})")
        out.append(f"fully spatial mesh elements: {self.spatial_mesh_elements}")
        out.append(
            f"fully temporal time estimate: {self.temporal_time_estimate_bins} bins; "
            f"hybrid/temporal time ratio: {self.time_ratio_vs_temporal:.4f}"
        )
        return out


def device_inventory(schedule: TimedSchedule) -> InventoryReport:
    """Counted facts about a schedule plus coarse baselines: a fully spatial
    mesh needs n(n-1)/2 elements; a fully temporal loop needs about n bins
    per layer for n-1 layers."""
    n = schedule.n_logical
    per_device = []
    for dev in schedule.devices:
        cnt = sum(1 for s in schedule.steps if dev.id in s.settings)
        per_device.append((dev.id, dev.ports, cnt))
    inner = sum(1 for e in schedule.edges if e.kind == "inner")
    outer = len({(e.src, e.dst) for e in schedule.edges if e.kind == "outer"})
    link = sum(1 for e in schedule.edges if e.kind == "link")
    temporal = n * (n - 1)
    return InventoryReport(
        architecture=schedule.architecture,
        n=n, m=schedule.m,
        devices=tuple(per_device),
        switch_count=len(schedule.switch_ids),
        delay_lines_inner=inner,
        delay_lines_outer=outer,
        delay_lines_link=link,
        total_bins=schedule.total_bins,
        total_slots=schedule.total_slots,
        spatial_mesh_elements=n * (n - 1) // 2,
        temporal_time_estimate_bins=temporal,
        time_ratio_vs_temporal=schedule.total_bins / temporal if temporal else math.inf,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _setting_to_json(s: Setting):
    if s.kind == "identity":
        return "identity"
    if s.kind == "matrix":
        return {"matrix": matrix_to_json(s.matrix)}
    return {"angles": list(s.angles)}


def _setting_from_json(obj) -> Setting:
    if obj == "identity":
        return IDENTITY
    if "matrix" in obj:
        return Setting("matrix", matrix=matrix_from_json(obj["matrix"]))
    return Setting("angles", angles=tuple(obj["angles"]))


def schedule_to_json(schedule: TimedSchedule) -> str:
    doc = {
        "schema_version": 1,
        "architecture": schedule.architecture,
        "m": schedule.m,
        "n": schedule.n_logical,
        "n_original": schedule.n_original,
        "pulse_period": schedule.pulse_period,
        "slots_per_bin": schedule.slots_per_bin,
        "devices": [{"id": d.id, "ports": d.ports} for d in schedule.devices],
        "fire_order": list(schedule.fire_order),
        "delay_lines": [
            {
                "from": list(e.src), "to": list(e.dst), "delay": e.delay, "kind": e.kind,
                "switch": list(e.switch) if e.switch else None,
                "arrive_switch": list(e.arrive_switch) if e.arrive_switch else None,
            }
            for e in schedule.edges
        ],
        "switches": list(schedule.switch_ids),
        "input_map": [[list(p), slot, mode] for p, slot, mode in schedule.mode_map.inputs],
        "output_map": [[list(p), slot, mode] for p, slot, mode in schedule.mode_map.outputs],
        "output_phases": list(schedule.output_phases),
        "steps": [
            {
                "time_bin": s.time_bin,
                "settings": {d: _setting_to_json(v) for d, v in sorted(s.settings.items())},
                "switches": dict(sorted(s.switches.items())),
            }
            for s in schedule.steps
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def schedule_from_json(text: str) -> TimedSchedule:
    doc = json.loads(text)
    edges = tuple(
        Edge(
            src=(e["from"][0], e["from"][1]), dst=(e["to"][0], e["to"][1]),
            delay=e["delay"], kind=e["kind"],
            switch=tuple(e["switch"]) if e.get("switch") else None,
            arrive_switch=tuple(e["arrive_switch"]) if e.get("arrive_switch") else None,
        )
        for e in doc["delay_lines"]
    )
    steps = tuple(
        TimeStep(
            time_bin=s["time_bin"],
            settings={d: _setting_from_json(v) for d, v in s["settings"].items()},
            switches=dict(s["switches"]),
        )
        for s in doc["steps"]
    )
    return TimedSchedule(
        architecture=doc["architecture"],
        m=doc["m"], n_logical=doc["n"], n_original=doc["n_original"],
        pulse_period=doc["pulse_period"], slots_per_bin=doc["slots_per_bin"],
        devices=tuple(DeviceSpec(d["id"], d["ports"]) for d in doc["devices"]),
        fire_order=tuple(doc["fire_order"]),
        edges=edges,
        switch_ids=tuple(doc["switches"]),
        mode_map=LogicalModeMap(
            inputs=tuple(((p[0], p[1]), slot, mode) for p, slot, mode in doc["input_map"]),
            outputs=tuple(((p[0], p[1]), slot, mode) for p, slot, mode in doc["output_map"]),
        ),
        output_phases=tuple(doc["output_phases"]),
        steps=steps,
    )
