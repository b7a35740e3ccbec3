"""Problem configuration: INI-style files, validation, echo, and the
registry of shipped example problems.

The grammar is documented in the README: sections [domain], [mesh],
[target], [displacements], [phases], [phases.passive],
[phases.responsive], [regularization] are required; [initial],
[optimizer], [output] are optional.  Unknown sections or keys are errors.
"""

import configparser
import io
from dataclasses import dataclass, field, fields as dc_fields
from importlib import resources

import numpy as np

from .errors import ConfigError
from .functional import RegularizationParams
from .materials import Material, PhaseSet
from .mesh import build_hexagon_mesh, build_rect_mesh
from .optimizer import OptimizerConfig

_OPTIMIZER_FLOAT_KEYS = ("grad_rtol", "grad_atol", "obj_rtol", "armijo_c",
                         "backtrack_factor", "initial_step", "step_growth")
_OPTIMIZER_INT_KEYS = ("max_outer_iters", "max_ls_trials", "restart_period",
                       "obj_stall_window")


@dataclass(frozen=True)
class ProblemSpec:
    """Fully resolved problem description."""

    domain_type: str                      # "rect" | "hexagon"
    h: float
    targets: tuple                        # ((ux, uy), ...) one per load case
    phases: PhaseSet
    params: RegularizationParams
    scheme: str = "staggered"             # "staggered" | "monolithic"
    lx: float = None
    ly: float = None
    dirichlet_side: str = "left"
    edge: float = None
    clamp_orientation: str = "odd"
    target_box: tuple = None              # rect: (x0, y0, x1, y1)
    target_edge: float = None             # hexagon
    initial_rho2: float = 0.3
    initial_rho3: float = 0.3
    initial_stimulus: float = 0.0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    solver_tol: float = 1e-10
    stimulus_mode: str = "nodal"
    output_dir: str = "out"
    export_every: int = 50

    @property
    def n_cases(self):
        return len(self.targets)

    def target_array(self):
        return np.array(self.targets, dtype=float)

    def build_mesh(self):
        if self.domain_type == "rect":
            return build_rect_mesh(self.lx, self.ly, self.h,
                                   self.dirichlet_side, self.target_box)
        return build_hexagon_mesh(self.edge, self.h, self.target_edge,
                                  self.clamp_orientation)


class _Section:
    """Tracks key consumption so unknown keys fail fast with their path."""

    def __init__(self, name, items):
        self.name = name
        self.items = dict(items)
        self.used = set()

    def get(self, key, cast=str, required=True, default=None):
        if key not in self.items:
            if required:
                raise ConfigError(f"missing required key {self.name}.{key}")
            return default
        self.used.add(key)
        raw = self.items[key]
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"key {self.name}.{key}: cannot parse {raw!r}") from exc

    def leftovers(self):
        return [f"{self.name}.{k}" for k in self.items if k not in self.used]


def _vector2(raw):
    parts = raw.replace(",", " ").split()
    if len(parts) != 2:
        raise ValueError("expected two components")
    return (float(parts[0]), float(parts[1]))


def _positive(name):
    def cast(raw):
        v = float(raw)
        if v <= 0:
            raise ValueError("must be positive")
        return v
    return cast


def parse_config(path=None, text=None, overrides=()):
    """Parse and validate a problem configuration.

    ``overrides`` are "section.key=value" strings applied before
    validation (the CLI's repeatable --override flag).
    """
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str
    try:
        if text is None:
            with open(path) as fh:
                cp.read_file(fh)
        else:
            cp.read_string(text)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from exc

    data = {s: dict(cp.items(s)) for s in cp.sections()}
    for ov in overrides:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {ov!r}")
        key_path, value = ov.split("=", 1)
        section, key = key_path.rsplit(".", 1)
        data.setdefault(section, {})[key] = value

    known = {"domain", "mesh", "target", "displacements", "phases",
             "phases.passive", "phases.responsive", "regularization",
             "initial", "optimizer", "output"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    for req in ("domain", "mesh", "target", "displacements", "phases",
                "phases.passive", "phases.responsive", "regularization"):
        if req not in data:
            raise ConfigError(f"missing required section [{req}]")

    secs = {name: _Section(name, items) for name, items in data.items()}

    def sec(name):
        return secs.get(name) or _Section(name, {})

    dom = sec("domain")
    domain_type = dom.get("type")
    kwargs = {}
    if domain_type == "rect":
        kwargs["lx"] = dom.get("lx", _positive("lx"))
        kwargs["ly"] = dom.get("ly", _positive("ly"))
        side = dom.get("dirichlet_side", required=False, default="left")
        if side not in ("left", "right", "bottom", "top"):
            raise ConfigError(f"domain.dirichlet_side: invalid value {side!r}")
        kwargs["dirichlet_side"] = side
    elif domain_type == "hexagon":
        kwargs["edge"] = dom.get("edge", _positive("edge"))
        orient = dom.get("clamp_orientation", required=False, default="odd")
        if orient not in ("odd", "even"):
            raise ConfigError(
                f"domain.clamp_orientation: must be odd or even, got {orient!r}")
        kwargs["clamp_orientation"] = orient
    else:
        raise ConfigError(f"domain.type: must be rect or hexagon, got {domain_type!r}")

    h = sec("mesh").get("h", _positive("h"))

    tgt = sec("target")
    if domain_type == "rect":
        box = tuple(tgt.get(k, float) for k in ("x0", "y0", "x1", "y1"))
        if not (0 <= box[0] <= box[2] <= kwargs["lx"]
                and 0 <= box[1] <= box[3] <= kwargs["ly"]):
            raise ConfigError("target box must sit inside the domain")
        kwargs["target_box"] = box
    else:
        te = tgt.get("edge", _positive("target edge"))
        if te >= kwargs["edge"]:
            raise ConfigError("target.edge must be smaller than domain.edge")
        kwargs["target_edge"] = te

    disp = sec("displacements")
    count = disp.get("count", int)
    if count < 1:
        raise ConfigError("displacements.count must be >= 1")
    targets = tuple(disp.get(f"u{j + 1}", _vector2) for j in range(count))

    ph = sec("phases")
    eta = ph.get("eta", float, required=False, default=1e-4)

    def material(section_name, default_beta):
        s = sec(section_name)
        young = s.get("young", float)
        poisson = s.get("poisson", float)
        beta = s.get("beta", float, required=False, default=default_beta)
        if young < 0:
            raise ConfigError(f"{section_name}.young: must be >= 0, got {young}")
        if not -1.0 < poisson < 0.5:
            raise ConfigError(
                f"{section_name}.poisson: must lie in (-1, 0.5), got {poisson}")
        if beta < 0:
            raise ConfigError(f"{section_name}.beta: must be >= 0, got {beta}")
        return Material(young, poisson, beta)

    passive = material("phases.passive", 0.0)
    responsive = material("phases.responsive", 1.0)
    if not 0.0 < eta <= 1e-2:
        raise ConfigError(f"phases.eta: must lie in (0, 1e-2], got {eta}")
    phase_set = PhaseSet.build(passive, responsive, eta)

    reg = sec("regularization")
    params = RegularizationParams(
        epsilon=reg.get("epsilon", _positive("epsilon")),
        alpha=reg.get("alpha", _positive("alpha")),
        nu2=reg.get("nu2", float),
        nu3=reg.get("nu3", float),
        q_weight=reg.get("q_weight", float, required=False, default=1.0),
    )

    init = sec("initial")
    initial = dict(
        initial_rho2=init.get("rho2", float, required=False, default=0.3),
        initial_rho3=init.get("rho3", float, required=False, default=0.3),
        initial_stimulus=init.get("stimulus", float, required=False, default=0.0),
    )
    if not (0 <= initial["initial_rho2"] <= 1 and 0 <= initial["initial_rho3"] <= 1):
        raise ConfigError("initial.rho2/rho3 must lie in [0, 1]")
    if abs(initial["initial_stimulus"]) > 1:
        raise ConfigError("initial.stimulus must lie in [-1, 1]")

    opt = sec("optimizer")
    scheme = opt.get("scheme", required=False, default="staggered")
    if scheme not in ("staggered", "monolithic"):
        raise ConfigError(f"optimizer.scheme: must be staggered or monolithic, "
                          f"got {scheme!r}")
    opt_kwargs = {}
    for key in _OPTIMIZER_FLOAT_KEYS:
        v = opt.get(key, float, required=False)
        if v is not None:
            opt_kwargs[key] = v
    for key in _OPTIMIZER_INT_KEYS:
        v = opt.get(key, int, required=False)
        if v is not None:
            opt_kwargs[key] = v
    solver_tol = opt.get("solver_tol", float, required=False, default=1e-10)
    stimulus_mode = opt.get("stimulus_mode", required=False, default="nodal")
    if stimulus_mode not in ("nodal", "element"):
        raise ConfigError(f"optimizer.stimulus_mode: must be nodal or element, "
                          f"got {stimulus_mode!r}")

    out = sec("output")
    output_dir = out.get("directory", required=False, default="out")
    export_every = out.get("export_every", int, required=False, default=50)
    if export_every < 1:
        raise ConfigError("output.export_every must be >= 1")

    leftovers = [k for s in secs.values() for k in s.leftovers()]
    if leftovers:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(leftovers))}")

    return ProblemSpec(
        domain_type=domain_type, h=h, targets=targets, phases=phase_set,
        params=params, scheme=scheme, **kwargs, **initial,
        optimizer=OptimizerConfig(**opt_kwargs), solver_tol=solver_tol,
        stimulus_mode=stimulus_mode, output_dir=output_dir,
        export_every=export_every,
    )


def echo_config(spec):
    """Serialize a spec back to INI text; parse(echo(spec)) == spec."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    dom = {"type": spec.domain_type}
    if spec.domain_type == "rect":
        dom.update(lx=repr(spec.lx), ly=repr(spec.ly),
                   dirichlet_side=spec.dirichlet_side)
    else:
        dom.update(edge=repr(spec.edge), clamp_orientation=spec.clamp_orientation)
    cp["domain"] = dom
    cp["mesh"] = {"h": repr(spec.h)}
    if spec.domain_type == "rect":
        x0, y0, x1, y1 = spec.target_box
        cp["target"] = {"x0": repr(x0), "y0": repr(y0),
                        "x1": repr(x1), "y1": repr(y1)}
    else:
        cp["target"] = {"edge": repr(spec.target_edge)}
    disp = {"count": str(spec.n_cases)}
    for j, (ux, uy) in enumerate(spec.targets):
        disp[f"u{j + 1}"] = f"{ux!r} {uy!r}"
    cp["displacements"] = disp
    cp["phases"] = {"eta": repr(spec.phases.eta)}
    for name, mat in (("passive", spec.phases.passive),
                      ("responsive", spec.phases.responsive)):
        cp[f"phases.{name}"] = {"young": repr(mat.young),
                                "poisson": repr(mat.poisson),
                                "beta": repr(mat.beta)}
    cp["regularization"] = {k: repr(getattr(spec.params, k))
                            for k in ("epsilon", "alpha", "nu2", "nu3", "q_weight")}
    cp["initial"] = {"rho2": repr(spec.initial_rho2),
                     "rho3": repr(spec.initial_rho3),
                     "stimulus": repr(spec.initial_stimulus)}
    opt = {"scheme": spec.scheme, "solver_tol": repr(spec.solver_tol),
           "stimulus_mode": spec.stimulus_mode}
    for f in dc_fields(OptimizerConfig):
        v = getattr(spec.optimizer, f.name)
        opt[f.name] = repr(v) if isinstance(v, float) else str(v)
    cp["optimizer"] = opt
    cp["output"] = {"directory": spec.output_dir,
                    "export_every": str(spec.export_every)}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def shipped_config_names():
    """Names of the bundled example problems."""
    root = resources.files("morphopt") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def shipped_config_text(name):
    root = resources.files("morphopt") / "configs"
    path = root / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(f"no shipped config named {name!r}; "
                          f"available: {', '.join(shipped_config_names())}")
    return path.read_text()


def load_shipped_config(name, overrides=()):
    return parse_config(text=shipped_config_text(name), overrides=overrides)
