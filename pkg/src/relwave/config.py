"""Scenario configuration: a YAML document describing one experiment, or
several under ``scenarios:`` sharing top-level defaults."""

import copy
import math
from dataclasses import dataclass, field

import yaml

from relwave.grid import Family, PacketSpec
from relwave.potential import SplitStepPlan

__all__ = [
    "DEFAULTS",
    "EQUATIONS",
    "ConfigError",
    "OutputSpec",
    "ScenarioConfig",
    "Units",
    "load_config",
    "parse_config",
    "reference_page",
]

EQUATIONS = (
    "heat_nonrel",
    "heat_rel",
    "heat_rel_subordinated",
    "salpeter",
    "salpeter_massless",
    "dirac",
    "kg",
    "salpeter_linear",
    "dirac_linear",
)

SPINOR_EQUATIONS = ("dirac", "dirac_linear")
SPLIT_EQUATIONS = ("dirac_linear",)
MU0_EQUATIONS = ("salpeter_linear", "dirac_linear")

# (key path, default, description); rendered by reference_page()
DEFAULTS = [
    ("name", "scenario", "label used for output files"),
    ("equation", None, "one of: " + ", ".join(EQUATIONS)),
    ("packet.family", None, "one of: " + ", ".join(f.value for f in Family)),
    ("packet.beta", 1.0, "localization parameter beta > 0"),
    ("packet.b", 1.0, "massless Cauchy scale b > 0"),
    ("packet.component_weights", None,
     "Dirac families: [w_plus, w_minus]; complex entries as strings, e.g. '1+0.5j'"),
    ("packet.normalize", True, "L2-normalize the packet (false: raw profiles)"),
    ("grid.n_points", 4096, "power of two >= 16"),
    ("grid.length", 80.0, "periodic box length in Compton units"),
    ("times", None, "nonempty, nondecreasing list of dimensionless times"),
    ("mu0", None, "linear potential strength (salpeter_linear, dirac_linear)"),
    ("split.step_tau", 0.01, "Zassenhaus step (dirac_linear)"),
    ("split.shift_mode", "spectral", "'spectral' or 'index' translations"),
    ("outputs.snapshots", True, "write field samples per time"),
    ("outputs.diagnostics", True, "write the diagnostics JSON"),
    ("outputs.compare_closed_form", False,
     "sup-norm error against the closed form where one exists"),
    ("outputs.peak_threshold", 1e-3, "relative prominence for peak counting"),
    ("units.lambda_c", 1.0, "Compton wavelength for dimensional relabeling, x = lambda_c xi"),
    ("units.c", 1.0, "speed of light for dimensional relabeling, t = lambda_c tau / c"),
]


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the field."""


@dataclass(frozen=True)
class OutputSpec:
    snapshots: bool = True
    diagnostics: bool = True
    compare_closed_form: bool = False
    peak_threshold: float = 1e-3


@dataclass(frozen=True)
class Units:
    lambda_c: float = 1.0
    c: float = 1.0

    def length(self, xi):
        return self.lambda_c * xi

    def time(self, tau):
        return self.lambda_c * tau / self.c


@dataclass(frozen=True)
class ScenarioConfig:
    equation: str
    packet: PacketSpec
    times: tuple
    n_points: int = 4096
    length: float = 80.0
    normalize: bool = True
    mu0: float | None = None
    step_tau: float | None = None
    shift_mode: str = "spectral"
    outputs: OutputSpec = field(default_factory=OutputSpec)
    units: Units | None = None
    name: str = "scenario"

    def split_plan(self, span: float) -> SplitStepPlan:
        return SplitStepPlan.covering(span, self.step_tau)


def _section(doc, key):
    val = doc.get(key, {})
    if val is None:
        return {}
    if not isinstance(val, dict):
        raise ConfigError(f"{key}: expected a mapping")
    return val


def _unknown(section, allowed, prefix):
    extra = set(section) - set(allowed)
    if extra:
        raise ConfigError(f"{prefix}: unknown key(s) {sorted(extra)}")


def _number(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    if positive and not value > 0:
        raise ConfigError(f"{path}: must be > 0, got {value!r}")
    return value


def _flag(value, path):
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    return value


def _complex(value, path):
    try:
        return complex(value.replace(" ", "")) if isinstance(value, str) else complex(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: cannot read {value!r} as a complex number") from None


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a single-scenario mapping and build a :class:`ScenarioConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a mapping at top level")
    _unknown(doc, ("name", "equation", "packet", "grid", "times", "mu0", "split",
                   "outputs", "units"), "config")

    equation = doc.get("equation")
    if equation not in EQUATIONS:
        raise ConfigError(f"equation: expected one of {list(EQUATIONS)}, got {equation!r}")

    pk = _section(doc, "packet")
    _unknown(pk, ("family", "beta", "b", "component_weights", "normalize"), "packet")
    if "family" not in pk:
        raise ConfigError("packet.family: required")
    try:
        family = Family(pk["family"])
    except ValueError:
        raise ConfigError(f"packet.family: unknown family {pk['family']!r}") from None
    beta = _number(pk.get("beta", 1.0), "packet.beta", positive=True)
    b = _number(pk.get("b", 1.0), "packet.b", positive=True)
    weights = pk.get("component_weights")
    if weights is not None:
        if not isinstance(weights, list) or len(weights) != 2:
            raise ConfigError("packet.component_weights: expected a list of two entries")
        weights = tuple(_complex(w, f"packet.component_weights[{i}]")
                        for i, w in enumerate(weights))
    normalize = _flag(pk.get("normalize", True), "packet.normalize")
    spec = PacketSpec(family, beta=beta, b=b, component_weights=weights)
    if equation in SPINOR_EQUATIONS and not spec.is_spinor:
        raise ConfigError(f"packet.family: {equation} needs a two-component family")
    if equation not in SPINOR_EQUATIONS and spec.is_spinor:
        raise ConfigError(f"packet.family: {equation} needs a scalar family")

    gd = _section(doc, "grid")
    _unknown(gd, ("n_points", "length"), "grid")
    n_points = gd.get("n_points", 4096)
    if isinstance(n_points, bool) or not isinstance(n_points, int) \
            or n_points < 16 or n_points & (n_points - 1):
        raise ConfigError(f"grid.n_points: must be a power of two >= 16, got {n_points!r}")
    length = _number(gd.get("length", 80.0), "grid.length", positive=True)

    times = doc.get("times")
    if not isinstance(times, list) or not times:
        raise ConfigError("times: expected a nonempty list")
    times = tuple(_number(t, f"times[{i}]") for i, t in enumerate(times))
    if any(b_ < a_ for a_, b_ in zip(times, times[1:])):
        raise ConfigError("times: must be nondecreasing")
    if equation.startswith("heat") and times[0] < 0:
        raise ConfigError("times: heat evolution needs tau >= 0")
    if equation in SPLIT_EQUATIONS and times[0] < 0:
        raise ConfigError("times: split-step evolution runs forward, tau >= 0")

    mu0 = doc.get("mu0")
    if equation in MU0_EQUATIONS:
        if mu0 is None:
            raise ConfigError(f"mu0: required for {equation}")
        mu0 = _number(mu0, "mu0")
    elif mu0 is not None:
        raise ConfigError(f"mu0: not used by {equation}")

    sp = _section(doc, "split")
    _unknown(sp, ("step_tau", "shift_mode"), "split")
    step_tau = None
    shift_mode = sp.get("shift_mode", "spectral")
    if shift_mode not in ("spectral", "index"):
        raise ConfigError(f"split.shift_mode: expected 'spectral' or 'index', got {shift_mode!r}")
    if equation in SPLIT_EQUATIONS:
        step_tau = _number(sp.get("step_tau", 0.01), "split.step_tau", positive=True)
    elif sp:
        raise ConfigError(f"split: not used by {equation}")

    od = _section(doc, "outputs")
    _unknown(od, ("snapshots", "diagnostics", "compare_closed_form", "peak_threshold"), "outputs")
    outputs = OutputSpec(
        snapshots=_flag(od.get("snapshots", True), "outputs.snapshots"),
        diagnostics=_flag(od.get("diagnostics", True), "outputs.diagnostics"),
        compare_closed_form=_flag(od.get("compare_closed_form", False),
                                  "outputs.compare_closed_form"),
        peak_threshold=_number(od.get("peak_threshold", 1e-3), "outputs.peak_threshold"),
    )
    if outputs.peak_threshold < 0:
        raise ConfigError("outputs.peak_threshold: must be >= 0")

    units = None
    if doc.get("units") is not None:
        ud = _section(doc, "units")
        _unknown(ud, ("lambda_c", "c"), "units")
        units = Units(_number(ud.get("lambda_c", 1.0), "units.lambda_c", positive=True),
                      _number(ud.get("c", 1.0), "units.c", positive=True))

    name = str(doc.get("name", "scenario"))
    if not name or any(ch in name for ch in "/\\"):
        raise ConfigError(f"name: invalid label {name!r}")

    return ScenarioConfig(equation=equation, packet=spec, times=times, n_points=n_points,
                          length=length, normalize=normalize, mu0=mu0, step_tau=step_tau,
                          shift_mode=shift_mode, outputs=outputs, units=units, name=name)


def expand_document(doc) -> list:
    """Split a document into per-scenario mappings.

    A ``scenarios`` list inherits every other top-level key; nested
    mappings are merged one level deep.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a mapping at top level")
    if "scenarios" not in doc:
        return [doc]
    subs = doc["scenarios"]
    if not isinstance(subs, list) or not subs:
        raise ConfigError("scenarios: expected a nonempty list")
    base = {k: v for k, v in doc.items() if k != "scenarios"}
    out = []
    for i, sub in enumerate(subs):
        if not isinstance(sub, dict):
            raise ConfigError(f"scenarios[{i}]: expected a mapping")
        merged = copy.deepcopy(base)
        for k, v in sub.items():
            if isinstance(v, dict) and isinstance(merged.get(k), dict):
                merged[k] = {**merged[k], **v}
            else:
                merged[k] = copy.deepcopy(v)
        merged.setdefault("name", f"scenario{i}")
        out.append(merged)
    names = [m["name"] for m in out]
    if len(set(names)) != len(names):
        raise ConfigError("scenarios: names must be unique")
    return out


def load_config(path) -> list:
    """Read a YAML file and return the list of :class:`ScenarioConfig`."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: YAML syntax error: {exc}") from None
    configs = []
    for i, sub in enumerate(expand_document(doc)):
        try:
            configs.append(parse_config(sub))
        except ConfigError as exc:
            if "scenarios" in doc:
                raise ConfigError(f"scenarios[{i}].{exc}") from None
            raise
    return configs


def reference_page() -> str:
    """Markdown table of every config key with its default."""
    lines = ["# Scenario configuration reference", "",
             "| key | default | meaning |", "|---|---|---|"]
    for key, default, text in DEFAULTS:
        shown = "required" if default is None and key in ("equation", "packet.family", "times") \
            else ("-" if default is None else repr(default))
        lines.append(f"| `{key}` | {shown} | {text} |")
    lines += ["",
              "A document may instead hold `scenarios: [...]`; each entry inherits the",
              "other top-level keys (mappings merged one level deep). Names must be unique;",
              "unnamed entries default to `scenario0`, `scenario1`, ..."]
    return "\n".join(lines) + "\n"
