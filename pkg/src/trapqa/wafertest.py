"""Needle-card electrical test of a trap chip, simulated.

The test plan walks a fixed sequence of four phases and aborts at the first
failing step:

1. **Continuity** on every bond-pad loop: force 1 mA, the voltage must stay
   in the 0..100 mV window and the current in 0.8..1.3 mA. An open loop
   drives the current source into its 10 V compliance.
2. **Leakage** (twice): every electrode bond pad is sensed individually
   while 50 V DC is applied to all other electrodes and the ground plane;
   the sensed current must not exceed 100 nA and the sense voltage must stay
   within +-100 mV. One extra configuration per pass stresses the RF line at
   300 V while sensing the leak current it drives. The pass is repeated to
   catch marginal and intermittent paths.
3. **Resistance**: force 5 mV across each net and check the measured
   resistance band: 0..50 ohm for DC and RF loops, the sensor-element bands
   for the two thermometers.

The bundled default netlist (70 DC loop groups, 6 compensation electrodes,
2 four-pad sensors, RF, ground) makes the plan exactly 480 steps long:
79 continuity + 2 x 161 leakage (152 DC-class pads + 8 sensor pads + 1 RF
stress) + 79 resistance. At 16.25 ms per step a defect-free chip completes
in 7.8 s.

Simulation is deterministic: nominal isolation is perfect and measurement
noise is off unless an explicit RNG is provided.
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Net",
    "ChipNetlist",
    "Fault",
    "TestLimits",
    "TestStep",
    "StepRecord",
    "ChipResult",
    "DEFAULT_LIMITS",
    "default_netlist",
    "load_netlist",
    "netlist_from_dict",
    "load_faults",
    "faults_from_dict",
    "build_plan",
    "simulate_step",
    "run_chip",
    "run_wafer",
    "FAILURE_CODES",
]

FAILURE_CODES = (
    "HW_FAIL",
    "CONTINUITY_FAIL",
    "LEAK_DC_DC",
    "LEAK_DC_RF",
    "LEAK_DC_GND",
    "LEAK_RF",
    "RES_FAIL_DC",
    "RES_FAIL_RF",
    "RES_FAIL_TS",
)

NET_ROLES = ("dc", "comp", "ts", "rf", "gnd")


@dataclass(frozen=True)
class Net:
    """One electrically testable net of the chip.

    ``loop_resistance`` is the bond-pad loop (pad, trace, electrode, trace,
    pad). Sensors additionally carry ``element_resistance``, the four-wire
    resistance of the sensing element itself, which is what the resistance
    phase measures for role ``ts``. ``group`` optionally names the DC supply
    line the net shares with others (used by spatial-defect analytics).
    """

    id: str
    role: str
    pads: tuple[str, ...]
    loop_resistance: float
    element_resistance: float | None = None
    group: str | None = None

    def __post_init__(self):
        if self.role not in NET_ROLES:
            raise ValueError(f"net {self.id!r}: role must be one of {NET_ROLES}")
        if self.loop_resistance <= 0:
            raise ValueError(f"net {self.id!r}: loop_resistance must be positive")
        if self.role == "ts":
            if self.element_resistance is None or self.element_resistance <= 0:
                raise ValueError(f"sensor net {self.id!r} needs element_resistance > 0")
            if len(self.pads) != 4:
                raise ValueError(f"sensor net {self.id!r} needs 4 pads (Kelvin)")
        elif self.role != "gnd" and len(self.pads) < 2:
            raise ValueError(f"net {self.id!r} needs at least 2 pads")


@dataclass(frozen=True)
class ChipNetlist:
    nets: tuple[Net, ...]
    name: str = ""
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        ids = [n.id for n in self.nets]
        if len(set(ids)) != len(ids):
            raise ValueError("net ids must be unique")
        pads = [p for n in self.nets for p in n.pads]
        if len(set(pads)) != len(pads):
            raise ValueError("pad names must be unique across nets")
        object.__setattr__(self, "_index", {n.id: n for n in self.nets})

    def net(self, net_id: str) -> Net:
        try:
            return self._index[net_id]
        except KeyError:
            raise KeyError(f"no net {net_id!r}") from None

    def ids(self, *roles: str) -> list[str]:
        """Net ids with any of the given roles (all if none given), ascending."""
        out = [n.id for n in self.nets if not roles or n.role in roles]
        return sorted(out)


@dataclass(frozen=True)
class Fault:
    """A planted electrical defect.

    Kinds: ``OPEN`` (net loop broken), ``SHORT`` (resistive path between two
    nets), ``LEAK_TO_GND`` (resistive path from a net to the ground plane),
    ``RESISTANCE_SHIFT`` (net resistances multiplied by ``factor``),
    ``HW_FAIL`` (instrument failure at plan step ``step_index``).
    """

    kind: str
    net: str | None = None
    other: str | None = None
    resistance: float = 0.0
    factor: float = 1.0
    step_index: int = -1

    def __post_init__(self):
        if self.kind == "OPEN":
            if not self.net:
                raise ValueError("OPEN needs a net")
        elif self.kind == "SHORT":
            if not (self.net and self.other) or self.net == self.other:
                raise ValueError("SHORT needs two distinct nets")
            if self.resistance <= 0:
                raise ValueError("SHORT needs a positive path resistance")
        elif self.kind == "LEAK_TO_GND":
            if not self.net or self.resistance <= 0:
                raise ValueError("LEAK_TO_GND needs a net and positive resistance")
        elif self.kind == "RESISTANCE_SHIFT":
            if not self.net or self.factor <= 0:
                raise ValueError("RESISTANCE_SHIFT needs a net and positive factor")
        elif self.kind == "HW_FAIL":
            if self.step_index < 0:
                raise ValueError("HW_FAIL needs a step_index >= 0")
        else:
            raise ValueError(f"unknown fault kind {self.kind!r}")

    @classmethod
    def open(cls, net: str) -> "Fault":
        return cls(kind="OPEN", net=net)

    @classmethod
    def short(cls, net: str, other: str, resistance: float) -> "Fault":
        return cls(kind="SHORT", net=net, other=other, resistance=resistance)

    @classmethod
    def leak_to_gnd(cls, net: str, resistance: float) -> "Fault":
        return cls(kind="LEAK_TO_GND", net=net, resistance=resistance)

    @classmethod
    def resistance_shift(cls, net: str, factor: float) -> "Fault":
        return cls(kind="RESISTANCE_SHIFT", net=net, factor=factor)

    @classmethod
    def hw_fail(cls, step_index: int) -> "Fault":
        return cls(kind="HW_FAIL", step_index=step_index)


@dataclass(frozen=True)
class TestLimits:
    """Instrument settings and pass windows for the four test phases.

    ``swap_sensor_bands`` exchanges which sensor gets which resistance band;
    the default binding gives the first sensor (ascending id) the high band.
    """

    continuity_force: float = 1.0e-3
    continuity_v: tuple[float, float] = (0.0, 0.1)
    continuity_i: tuple[float, float] = (0.8e-3, 1.3e-3)
    leakage_bias_dc: float = 50.0
    leakage_bias_rf: float = 300.0
    leakage_i_max: float = 100e-9
    leakage_v_window: float = 0.1
    resistance_force: float = 5.0e-3
    loop_band: tuple[float, float] = (0.0, 50.0)
    ts_band_high: tuple[float, float] = (28.9e3, 35.7e3)
    ts_band_low: tuple[float, float] = (10.3e3, 11.3e3)
    swap_sensor_bands: bool = False
    compliance_v: float = 10.0
    step_time: float = 0.01625


DEFAULT_LIMITS = TestLimits()


@dataclass(frozen=True)
class TestStep:
    """One plan entry: a force/sense configuration with a pass window."""

    index: int
    kind: str  # CONTINUITY | LEAKAGE | LEAKAGE_RF | RESISTANCE
    net: str
    pass_index: int = 0  # 1 or 2 for the two leakage passes
    pad: str | None = None  # sensed pad for per-pad leakage steps


@dataclass(frozen=True)
class StepRecord:
    """Executed step: forced value, measured voltage/current, verdict."""

    index: int
    net: str
    test_kind: str
    forced: float
    measured_v: float
    measured_i: float
    verdict: str  # PASS or a failure code


@dataclass(frozen=True)
class ChipResult:
    outcome: str  # PASS or the failure code of the aborting step
    steps_executed: int
    elapsed_s: float
    log: tuple[StepRecord, ...]

    @property
    def passed(self) -> bool:
        return self.outcome == "PASS"


def default_netlist() -> ChipNetlist:
    """The bundled linear-trap netlist; its plan is exactly 480 steps.

    70 DC loop groups (supply lines cycle in threes, ``group`` records the
    line), 6 compensation loops, two Kelvin-connected sensors, an RF loop
    and the ground plane. Step arithmetic: 79 continuity + 2 passes x
    (152 DC/comp pads + 8 sensor pads + 1 RF stress) + 79 resistance = 480.
    """
    nets = []
    for k in range(1, 71):
        nets.append(
            Net(
                id=f"DC{k:02d}",
                role="dc",
                pads=(f"DC{k:02d}A", f"DC{k:02d}B"),
                loop_resistance=20.0,
                group=f"SUP{(k - 1) % 3 + 1}",
            )
        )
    for k in range(1, 7):
        nets.append(
            Net(
                id=f"CP{k}",
                role="comp",
                pads=(f"CP{k}A", f"CP{k}B"),
                loop_resistance=20.0,
            )
        )
    nets.append(
        Net(
            id="TS1",
            role="ts",
            pads=("TS1A", "TS1B", "TS1C", "TS1D"),
            loop_resistance=15.0,
            element_resistance=32.3e3,
        )
    )
    nets.append(
        Net(
            id="TS2",
            role="ts",
            pads=("TS2A", "TS2B", "TS2C", "TS2D"),
            loop_resistance=15.0,
            element_resistance=10.8e3,
        )
    )
    nets.append(Net(id="RF", role="rf", pads=("RFA", "RFB"), loop_resistance=5.0))
    nets.append(Net(id="GND", role="gnd", pads=("GNDA",), loop_resistance=1.0))
    return ChipNetlist(nets=tuple(nets), name="linear_trap_480")


def netlist_from_dict(data: dict) -> ChipNetlist:
    nets = tuple(
        Net(
            id=n["id"],
            role=n["role"],
            pads=tuple(n["pads"]),
            # the ground plane is not probed as a loop; its resistance entry
            # is a placeholder and may be omitted in configs
            loop_resistance=(
                float(n["loop_resistance_ohm"]) if n["role"] != "gnd"
                else float(n.get("loop_resistance_ohm", 1.0))
            ),
            element_resistance=(
                float(n["element_resistance_ohm"]) if "element_resistance_ohm" in n else None
            ),
            group=n.get("group"),
        )
        for n in data["nets"]
    )
    return ChipNetlist(nets=nets, name=data.get("name", ""))


def load_netlist(path) -> ChipNetlist:
    with open(path, "r", encoding="utf-8") as fh:
        return netlist_from_dict(json.load(fh))


def faults_from_dict(data: dict) -> tuple[Fault, ...]:
    out = []
    for f in data.get("faults", []):
        kind = f["kind"]
        out.append(
            Fault(
                kind=kind,
                net=f.get("net"),
                other=f.get("other"),
                resistance=float(f.get("resistance_ohm", 0.0)),
                factor=float(f.get("factor", 1.0)),
                step_index=int(f.get("step_index", -1)),
            )
        )
    return tuple(out)


def load_faults(path) -> tuple[Fault, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        return faults_from_dict(json.load(fh))


def build_plan(netlist: ChipNetlist) -> tuple[TestStep, ...]:
    """The four-phase plan, intra-phase order ascending by net id (then pad)."""
    steps = []

    def add(kind, net, pass_index=0, pad=None):
        steps.append(
            TestStep(index=len(steps), kind=kind, net=net, pass_index=pass_index, pad=pad)
        )

    loop_ids = netlist.ids("dc", "comp", "ts", "rf")
    for nid in loop_ids:
        add("CONTINUITY", nid)

    for pass_index in (1, 2):
        for nid in netlist.ids("dc", "comp", "rf", "ts"):
            net = netlist.net(nid)
            if net.role == "rf":
                add("LEAKAGE_RF", nid, pass_index)
            else:
                for pad in net.pads:
                    add("LEAKAGE", nid, pass_index, pad=pad)

    for nid in loop_ids:
        add("RESISTANCE", nid)

    return tuple(steps)


def _shift_factor(net_id: str, faults) -> float:
    f = 1.0
    for fault in faults:
        if fault.kind == "RESISTANCE_SHIFT" and fault.net == net_id:
            f *= fault.factor
    return f


def _is_open(net_id: str, faults) -> bool:
    return any(f.kind == "OPEN" and f.net == net_id for f in faults)


def _leak_paths(net_id: str, netlist: ChipNetlist, faults):
    """(path_resistance, code_class) for every defect path touching ``net_id``.

    ``code_class`` is the failure code the path maps to when sensed from a
    DC-class net.
    """
    paths = []
    for f in faults:
        if f.kind == "SHORT" and net_id in (f.net, f.other):
            other = f.other if f.net == net_id else f.net
            role = netlist.net(other).role
            if role == "rf":
                code = "LEAK_DC_RF"
            elif role == "gnd":
                code = "LEAK_DC_GND"
            else:
                code = "LEAK_DC_DC"
            paths.append((f.resistance, code))
        elif f.kind == "LEAK_TO_GND" and f.net == net_id:
            paths.append((f.resistance, "LEAK_DC_GND"))
    return paths


def _in(value: float, band: tuple[float, float]) -> bool:
    return band[0] <= value <= band[1]


def _ts_band(netlist: ChipNetlist, net_id: str, limits: TestLimits) -> tuple[float, float]:
    ts_ids = netlist.ids("ts")
    bands = [limits.ts_band_high, limits.ts_band_low]
    if limits.swap_sensor_bands:
        bands.reverse()
    return bands[ts_ids.index(net_id) % 2]


def simulate_step(
    netlist: ChipNetlist,
    faults,
    step: TestStep,
    limits: TestLimits = DEFAULT_LIMITS,
    rng: np.random.Generator | None = None,
) -> StepRecord:
    """Execute one plan step against the fault set.

    Deterministic unless ``rng`` is given, in which case Gaussian meter noise
    (1 uV, 0.1 nA one sigma) is added to the measured values.
    """
    for f in faults:
        if f.kind == "HW_FAIL" and f.step_index == step.index:
            return StepRecord(
                index=step.index,
                net=step.net,
                test_kind=_kind_label(step),
                forced=0.0,
                measured_v=0.0,
                measured_i=0.0,
                verdict="HW_FAIL",
            )

    net = netlist.net(step.net)
    shift = _shift_factor(step.net, faults)

    if step.kind == "CONTINUITY":
        forced = limits.continuity_force
        if _is_open(step.net, faults):
            v, i = limits.compliance_v, 0.0
        else:
            loop = net.loop_resistance * shift
            v_would = forced * loop
            if v_would >= limits.compliance_v:
                v, i = limits.compliance_v, limits.compliance_v / loop
            else:
                v, i = v_would, forced
        v, i = _noise(v, i, rng)
        ok = _in(v, limits.continuity_v) and _in(i, limits.continuity_i)
        verdict = "PASS" if ok else "CONTINUITY_FAIL"

    elif step.kind == "LEAKAGE":
        forced = limits.leakage_bias_dc
        paths = _leak_paths(step.net, netlist, faults)
        i = sum(forced / r for r, _ in paths)
        v = 0.0  # sense node held at virtual ground
        v, i = _noise(v, i, rng)
        ok = i <= limits.leakage_i_max and abs(v) <= limits.leakage_v_window
        if ok:
            verdict = "PASS"
        else:
            # attribute the failure to the strongest defect path
            paths.sort(key=lambda p: (p[0], p[1]))
            verdict = paths[0][1] if paths else "LEAK_DC_DC"

    elif step.kind == "LEAKAGE_RF":
        forced = limits.leakage_bias_rf
        paths = _leak_paths(step.net, netlist, faults)
        i = sum(forced / r for r, _ in paths)
        v = 0.0
        v, i = _noise(v, i, rng)
        ok = i <= limits.leakage_i_max and abs(v) <= limits.leakage_v_window
        verdict = "PASS" if ok else "LEAK_RF"

    else:  # RESISTANCE
        forced = limits.resistance_force
        if net.role == "ts":
            r_nominal = net.element_resistance
        else:
            r_nominal = net.loop_resistance
        if _is_open(step.net, faults):
            i = 0.0
            r_meas = np.inf
        else:
            r_meas = r_nominal * shift
            i = forced / r_meas
        v = forced
        v, i = _noise(v, i, rng)
        r_meas = v / i if i > 0 else np.inf
        if net.role == "ts":
            band = _ts_band(netlist, step.net, limits)
            code = "RES_FAIL_TS"
        else:
            band = limits.loop_band
            code = "RES_FAIL_RF" if net.role == "rf" else "RES_FAIL_DC"
        verdict = "PASS" if _in(r_meas, band) else code

    return StepRecord(
        index=step.index,
        net=step.net,
        test_kind=_kind_label(step),
        forced=forced,
        measured_v=v,
        measured_i=i,
        verdict=verdict,
    )


def _kind_label(step: TestStep) -> str:
    if step.kind in ("LEAKAGE", "LEAKAGE_RF"):
        return f"{step.kind}_{step.pass_index}"
    return step.kind


def _noise(v: float, i: float, rng) -> tuple[float, float]:
    if rng is None:
        return v, i
    return v + rng.normal(0.0, 1e-6), i + rng.normal(0.0, 1e-10)


def run_chip(
    netlist: ChipNetlist,
    faults=(),
    limits: TestLimits = DEFAULT_LIMITS,
    rng: np.random.Generator | None = None,
) -> ChipResult:
    """Run the plan against one chip, aborting at the first failing step.

    ``steps_executed`` counts the aborting step itself, so a defect caught at
    the very first step reports 1. Elapsed time is the fixed per-step cost
    times the number of executed steps.
    """
    plan = build_plan(netlist)
    log = []
    for step in plan:
        rec = simulate_step(netlist, faults, step, limits, rng)
        log.append(rec)
        if rec.verdict != "PASS":
            return ChipResult(
                outcome=rec.verdict,
                steps_executed=len(log),
                elapsed_s=len(log) * limits.step_time,
                log=tuple(log),
            )
    return ChipResult(
        outcome="PASS",
        steps_executed=len(log),
        elapsed_s=len(log) * limits.step_time,
        log=tuple(log),
    )


def run_wafer(
    chip_faults: dict,
    netlist: ChipNetlist | None = None,
    limits: TestLimits = DEFAULT_LIMITS,
) -> dict:
    """Test every chip in ``chip_faults`` (id -> fault tuple), deterministically.

    Chips are independent; results are computed and returned in ascending
    chip-id order.
    """
    if netlist is None:
        netlist = default_netlist()
    results = {}
    for chip_id in sorted(chip_faults):
        results[chip_id] = run_chip(netlist, chip_faults[chip_id], limits)
    return results
