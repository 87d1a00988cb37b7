"""Self-describing scenario files driving the command-line experiments.

A scenario is a JSON document with nested sections for the path-loss model,
small-scale fading samples, system parameters, modulation, and an optional
sweep descriptor.  Decibel quantities carry an explicit `_db`/`_dbm` suffix
and are converted at load; the in-memory form is always linear, so the core
modules never see units.  Unknown keys are rejected with the offending key
named.  Writing a scenario and reading it back reproduces the in-memory
value exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .channel import TWO_PI, ChannelTriple, PathLossModel, SystemParams, channel_from_path_loss
from .constellation import (Constellation, equal_power_psk_amplitude, explicit_constellation,
                            mask_constellation, mpsk_constellation)
from .phase_opt import optimal_phase_ask, optimal_phase_psk


class ScenarioError(ValueError):
    """A scenario file or override is malformed or violates a precondition."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


#: Section V operating point: carrier wavelength 0.33 m, exponent 3.5,
#: 6 dB antenna gains, 200 m / 200 m / 0.36 m link distances, 0.05 W transmit
#: power, -100 dBm noise, ring amplitude 0.9, and both fixed fading triples.
DEFAULT_SCENARIO: dict = {
    "pathloss": {
        "wavelength_m": 0.33,
        "gain_pt_db": 6.0,
        "gain_rx_db": 6.0,
        "gain_bd_db": 6.0,
        "exponent": 3.5,
        "d1_m": 200.0,
        "d2_m": 200.0,
        "d3_m": 0.36,
    },
    "fading": {
        "l1": [0.3421, -0.4988],
        "l2": [-0.0139, -0.4378],
        "l3": [-0.5246, -1.0546],
        "l1_prime": [0.2651, 0.0031],
        "l2_prime": [-1.2621, 0.0425],
        "l3_prime": [-0.3110, -0.7787],
        "use_prime": False,
    },
    "system": {
        "power_w": 0.05,
        "noise_dbm": -100.0,
        "spread": 128,
    },
    "modulation": {
        "scheme": "mask",
        "order": 2,
        "base_phase": "optimal",
        "min_bd_rate_bits": 0.0,
    },
    "sweep": {
        "variable": "base_phase",
        "steps": 721,
    },
    "seed": 20260808,
}


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    steps: int
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self) -> None:
        if self.variable not in ("base_phase", "channel_ratio", "order"):
            raise ScenarioError(f"sweep.variable must be one of base_phase, "
                                f"channel_ratio, order; got {self.variable!r}")
        if not (isinstance(self.steps, int) and self.steps >= 1):
            raise ScenarioError(f"sweep.steps must be an integer >= 1, got {self.steps!r}")


@dataclass(frozen=True)
class Scenario:
    """Validated scenario: all referenced module preconditions hold."""

    pathloss: PathLossModel
    l1: complex
    l2: complex
    l3: complex
    l1_prime: complex | None
    l2_prime: complex | None
    l3_prime: complex | None
    use_prime: bool
    system: SystemParams
    scheme: str
    order: int
    amplitude: float | None      # None selects the equal-power ring amplitude
    equal_power: bool
    base_phase: float | None     # None selects the closed-form optimum
    optimal_phase: bool
    min_bd_rate_bits: float
    sweep: SweepSpec | None
    seed: int

    def channel(self) -> ChannelTriple:
        if self.use_prime:
            if self.l1_prime is None:
                raise ScenarioError("fading.use_prime is set but no primed samples given")
            return channel_from_path_loss(self.pathloss, self.l1_prime,
                                          self.l2_prime, self.l3_prime)
        return channel_from_path_loss(self.pathloss, self.l1, self.l2, self.l3)

    def resolved_alpha0(self, order: int | None = None) -> float:
        """Ring amplitude for phase keying at the given (or scenario) order."""
        if self.equal_power or self.amplitude is None:
            return equal_power_psk_amplitude(order or self.order)
        return self.amplitude

    def resolved_base_phase(self, ch: ChannelTriple, order: int | None = None) -> float:
        m = order or self.order
        if self.optimal_phase or self.base_phase is None:
            if self.scheme == "mask":
                return optimal_phase_ask(ch.theta0).phase_rad
            return optimal_phase_psk(ch.theta0, m).phase_rad
        return self.base_phase

    def build_constellation(self, ch: ChannelTriple,
                            order: int | None = None,
                            base_phase: float | None = None) -> Constellation:
        m = order or self.order
        if self.scheme == "mpsk" and self.resolved_alpha0(m) == 0.0:
            # Zero ring amplitude: a silent device, phase immaterial.
            return explicit_constellation([0j] * m)
        phi0 = base_phase if base_phase is not None else self.resolved_base_phase(ch, m)
        if self.scheme == "mask":
            return mask_constellation(m, phi0)
        return mpsk_constellation(m, self.resolved_alpha0(m), phi0)


def _reject_unknown(section: dict, allowed: set[str], where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ScenarioError(f"unknown key '{where}.{key}'")


def _pick_db_or_linear(section: dict, name: str, where: str) -> float:
    lin, db = section.get(name), section.get(f"{name}_db")
    if lin is not None and db is not None:
        raise ScenarioError(f"{where}.{name} and {where}.{name}_db are mutually exclusive")
    if db is not None:
        return db_to_linear(float(db))
    if lin is None:
        raise ScenarioError(f"missing key {where}.{name} (or {where}.{name}_db)")
    return float(lin)


def _parse_complex(value, where: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        raise ScenarioError(f"{where} must be a [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def parse_scenario(raw: dict) -> Scenario:
    """Validate a raw scenario dictionary into a :class:`Scenario`."""
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    _reject_unknown(raw, {"pathloss", "fading", "system", "modulation", "sweep", "seed"},
                    "scenario")
    for required in ("pathloss", "fading", "system", "modulation"):
        if required not in raw:
            raise ScenarioError(f"missing section 'scenario.{required}'")

    pl = raw["pathloss"]
    _reject_unknown(pl, {"wavelength_m", "gain_pt", "gain_pt_db", "gain_rx", "gain_rx_db",
                         "gain_bd", "gain_bd_db", "exponent", "d1_m", "d2_m", "d3_m"},
                    "pathloss")
    try:
        model = PathLossModel(
            wavelength_m=float(pl["wavelength_m"]),
            gain_pt=_pick_db_or_linear(pl, "gain_pt", "pathloss"),
            gain_rx=_pick_db_or_linear(pl, "gain_rx", "pathloss"),
            gain_bd=_pick_db_or_linear(pl, "gain_bd", "pathloss"),
            exponent=float(pl["exponent"]),
            d1_m=float(pl["d1_m"]),
            d2_m=float(pl["d2_m"]),
            d3_m=float(pl["d3_m"]),
        )
    except KeyError as exc:
        raise ScenarioError(f"missing key 'pathloss.{exc.args[0]}'") from None
    except ValueError as exc:
        raise ScenarioError(f"invalid pathloss: {exc}") from None

    fd = raw["fading"]
    _reject_unknown(fd, {"l1", "l2", "l3", "l1_prime", "l2_prime", "l3_prime", "use_prime"},
                    "fading")
    try:
        l1 = _parse_complex(fd["l1"], "fading.l1")
        l2 = _parse_complex(fd["l2"], "fading.l2")
        l3 = _parse_complex(fd["l3"], "fading.l3")
    except KeyError as exc:
        raise ScenarioError(f"missing key 'fading.{exc.args[0]}'") from None
    primes = [fd.get(k) for k in ("l1_prime", "l2_prime", "l3_prime")]
    if any(p is not None for p in primes) and not all(p is not None for p in primes):
        raise ScenarioError("fading primed samples must be given for all three links or none")
    lp = [(_parse_complex(p, f"fading.l{i+1}_prime") if p is not None else None)
          for i, p in enumerate(primes)]
    use_prime = fd.get("use_prime", False)
    if not isinstance(use_prime, bool):
        raise ScenarioError(f"fading.use_prime must be a boolean, got {use_prime!r}")
    if use_prime and lp[0] is None:
        raise ScenarioError("fading.use_prime is set but no primed samples given")

    sy = raw["system"]
    _reject_unknown(sy, {"power_w", "noise_w", "noise_dbm", "spread"}, "system")
    try:
        noise_w_raw, noise_dbm_raw = sy.get("noise_w"), sy.get("noise_dbm")
        if noise_w_raw is not None and noise_dbm_raw is not None:
            raise ScenarioError("system.noise_w and system.noise_dbm are mutually exclusive")
        if noise_dbm_raw is not None:
            noise_w = dbm_to_watt(float(noise_dbm_raw))
        elif noise_w_raw is not None:
            noise_w = float(noise_w_raw)
        else:
            raise ScenarioError("missing key system.noise_w (or system.noise_dbm)")
        spread = sy.get("spread", 128)
        if not isinstance(spread, int) or isinstance(spread, bool):
            raise ScenarioError(f"system.spread must be an integer, got {spread!r}")
        system = SystemParams(power_w=float(sy["power_w"]), noise_w=noise_w, spread=spread)
    except KeyError as exc:
        raise ScenarioError(f"missing key 'system.{exc.args[0]}'") from None
    except ValueError as exc:
        raise ScenarioError(f"invalid system: {exc}") from None

    mo = raw["modulation"]
    _reject_unknown(mo, {"scheme", "order", "amplitude", "base_phase", "min_bd_rate_bits"},
                    "modulation")
    scheme = mo.get("scheme")
    if scheme not in ("mask", "mpsk"):
        raise ScenarioError(f"modulation.scheme must be 'mask' or 'mpsk', got {scheme!r}")
    order = mo.get("order")
    if not (isinstance(order, int) and not isinstance(order, bool) and order >= 2):
        raise ScenarioError(f"modulation.order must be an integer >= 2, got {order!r}")
    amp_raw = mo.get("amplitude")
    equal_power = amp_raw == "equal-power"
    amplitude: float | None = None
    if amp_raw is not None and not equal_power:
        if not isinstance(amp_raw, (int, float)):
            raise ScenarioError(f"modulation.amplitude must be a number or 'equal-power', "
                                f"got {amp_raw!r}")
        amplitude = float(amp_raw)
        # Zero is allowed as the degenerate silent-device case.
        if not (0.0 <= amplitude <= 1.0):
            raise ScenarioError(f"modulation.amplitude must lie in [0, 1], got {amplitude!r}")
    if scheme == "mask" and (amplitude is not None or equal_power):
        raise ScenarioError("modulation.amplitude applies only to the mpsk scheme")
    bp_raw = mo.get("base_phase", "optimal")
    optimal_phase = bp_raw == "optimal"
    base_phase: float | None = None
    if not optimal_phase:
        if not isinstance(bp_raw, (int, float)):
            raise ScenarioError(f"modulation.base_phase must be a number or 'optimal', "
                                f"got {bp_raw!r}")
        base_phase = float(bp_raw)
        limit = TWO_PI if scheme == "mask" else TWO_PI / order
        if not (0.0 <= base_phase < limit):
            raise ScenarioError(f"modulation.base_phase {base_phase!r} outside [0, {limit:g}) "
                                f"for scheme {scheme!r} order {order}")
    min_bd = mo.get("min_bd_rate_bits", 0.0)
    if not isinstance(min_bd, (int, float)) or min_bd < 0:
        raise ScenarioError(f"modulation.min_bd_rate_bits must be >= 0, got {min_bd!r}")

    sweep = None
    if "sweep" in raw and raw["sweep"] is not None:
        sw = raw["sweep"]
        _reject_unknown(sw, {"variable", "lo", "hi", "steps"}, "sweep")
        try:
            sweep = SweepSpec(
                variable=sw["variable"],
                steps=sw["steps"],
                lo=(float(sw["lo"]) if "lo" in sw else None),
                hi=(float(sw["hi"]) if "hi" in sw else None),
            )
        except KeyError as exc:
            raise ScenarioError(f"missing key 'sweep.{exc.args[0]}'") from None

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ScenarioError(f"seed must be a non-negative integer, got {seed!r}")

    return Scenario(
        pathloss=model,
        l1=l1, l2=l2, l3=l3,
        l1_prime=lp[0], l2_prime=lp[1], l3_prime=lp[2],
        use_prime=use_prime,
        system=system,
        scheme=scheme,
        order=order,
        amplitude=amplitude,
        equal_power=equal_power,
        base_phase=base_phase,
        optimal_phase=optimal_phase,
        min_bd_rate_bits=float(min_bd),
        sweep=sweep,
        seed=seed,
    )


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply repeatable `section.key=value` overrides to a raw scenario dict.

    Values parse as JSON fragments where possible (numbers, booleans, lists)
    and fall back to bare strings, so `modulation.base_phase=optimal` works
    without quoting.
    """
    out = json.loads(json.dumps(raw))  # deep copy, JSON types only
    for item in overrides:
        if "=" not in item:
            raise ScenarioError(f"override {item!r} must look like section.key=value")
        path, _, text = item.partition("=")
        keys = path.strip().split(".")
        if not all(keys):
            raise ScenarioError(f"override {item!r} has an empty key component")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        node = out
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ScenarioError(f"override {item!r} descends through a non-section key")
        node[keys[-1]] = value
    return out


def load_scenario(path: str | Path | None, overrides: list[str] | None = None) -> Scenario:
    """Read a scenario file (or the built-in default) and apply overrides."""
    if path is None:
        raw = DEFAULT_SCENARIO
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ScenarioError(f"scenario file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario file is not valid JSON: {exc}") from None
    if overrides:
        raw = apply_overrides(raw, overrides)
    return parse_scenario(raw)


def scenario_to_dict(scn: Scenario) -> dict:
    """Canonical raw form: linear units, explicit optional fields."""
    out: dict = {
        "pathloss": {
            "wavelength_m": scn.pathloss.wavelength_m,
            "gain_pt": scn.pathloss.gain_pt,
            "gain_rx": scn.pathloss.gain_rx,
            "gain_bd": scn.pathloss.gain_bd,
            "exponent": scn.pathloss.exponent,
            "d1_m": scn.pathloss.d1_m,
            "d2_m": scn.pathloss.d2_m,
            "d3_m": scn.pathloss.d3_m,
        },
        "fading": {
            "l1": [scn.l1.real, scn.l1.imag],
            "l2": [scn.l2.real, scn.l2.imag],
            "l3": [scn.l3.real, scn.l3.imag],
        },
        "system": {
            "power_w": scn.system.power_w,
            "noise_w": scn.system.noise_w,
            "spread": scn.system.spread,
        },
        "modulation": {
            "scheme": scn.scheme,
            "order": scn.order,
            "base_phase": "optimal" if scn.optimal_phase else scn.base_phase,
            "min_bd_rate_bits": scn.min_bd_rate_bits,
        },
        "seed": scn.seed,
    }
    if scn.l1_prime is not None:
        out["fading"]["l1_prime"] = [scn.l1_prime.real, scn.l1_prime.imag]
        out["fading"]["l2_prime"] = [scn.l2_prime.real, scn.l2_prime.imag]
        out["fading"]["l3_prime"] = [scn.l3_prime.real, scn.l3_prime.imag]
    out["fading"]["use_prime"] = scn.use_prime
    if scn.scheme == "mpsk":
        out["modulation"]["amplitude"] = "equal-power" if scn.equal_power else scn.amplitude
    if scn.sweep is not None:
        sw: dict = {"variable": scn.sweep.variable, "steps": scn.sweep.steps}
        if scn.sweep.lo is not None:
            sw["lo"] = scn.sweep.lo
        if scn.sweep.hi is not None:
            sw["hi"] = scn.sweep.hi
        out["sweep"] = sw
    return out


def write_scenario(scn: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scn), indent=2) + "\n")


def scenario_hash(scn: Scenario) -> str:
    """Short stable digest identifying a scenario in emitted artifacts."""
    canon = json.dumps(scenario_to_dict(scn), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
