"""Command-line interface.

Subcommands: run, check-gradient, profile-oracle, render, mesh-info.
MORPHOPT_THREADS caps internal worker threads (0 = automatic); the current
solvers are single-threaded, so any cap is honored trivially.
"""

import argparse
import contextlib
import os
import sys

import numpy as np

from . import verify
from .config import (load_shipped_config, parse_config, shipped_config_names)
from .errors import MorphoptError
from .fields import DesignField
from .functional import RegularizationParams
from .materials import Material, PhaseSet
from .mesh import Mesh, build_rect_mesh
from .render import composite_export


def max_threads():
    """Worker-thread cap from MORPHOPT_THREADS (0 = automatic)."""
    raw = os.environ.get("MORPHOPT_THREADS", "0")
    try:
        value = int(raw)
    except ValueError as exc:
        raise MorphoptError(f"MORPHOPT_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise MorphoptError(f"MORPHOPT_THREADS must be >= 0, got {value}")
    return value


@contextlib.contextmanager
def forbid_numpy_random():
    """Assert that no numpy randomness is drawn inside the block."""
    def raiser(*args, **kwargs):
        raise MorphoptError("randomness requested during a --seed-free run")

    saved = (np.random.default_rng, np.random.seed, np.random.RandomState)
    np.random.default_rng = raiser
    np.random.seed = raiser
    np.random.RandomState = raiser
    try:
        yield
    finally:
        np.random.default_rng, np.random.seed, np.random.RandomState = saved


def _load_spec(args):
    overrides = args.override or ()
    if args.config in shipped_config_names():
        return load_shipped_config(args.config, overrides=overrides)
    return parse_config(args.config, overrides=overrides)


def _cmd_run(args):
    from . import runner

    spec = _load_spec(args)
    max_threads()
    if args.seed_free:
        with forbid_numpy_random():
            artifacts = runner.run(spec, out_dir=args.out)
    else:
        artifacts = runner.run(spec, out_dir=args.out)
    print(f"status,{artifacts.status}")
    print(f"iterations,{artifacts.summary['iterations']}")
    print(f"total,{artifacts.summary['total']!r}")
    print(f"out_dir,{artifacts.out_dir}")
    return 0


def _default_check_problem(h):
    mesh = build_rect_mesh(1.0, 1.0 / 3.0, h, "left",
                           (1.0 - 1.0 / 15.0, 1.0 / 6.0 - 1.0 / 30.0,
                            1.0, 1.0 / 6.0 + 1.0 / 30.0))
    phases = PhaseSet.build(Material(5.0, 0.3, 0.0), Material(5.0, 0.3, 1.0))
    params = RegularizationParams(epsilon=2.0 * h, alpha=6e-4, nu2=0.1, nu3=0.3)
    targets = np.array([[0.0, 1.0]])
    return mesh, phases, params, targets


def _cmd_check_gradient(args):
    if args.config:
        spec = _load_spec(args)
        mesh = spec.build_mesh()
        phases, params, targets = spec.phases, spec.params, spec.target_array()
    else:
        mesh, phases, params, targets = _default_check_problem(args.h)
    result = verify.fd_gradient_check(mesh, phases, params, targets,
                                      trials=args.trials, delta=args.delta,
                                      seed=args.seed)
    print("block,max_relative_error")
    print(f"design,{result.design_error!r}")
    print(f"stimulus,{result.stimulus_error!r}")
    return 0 if result.max_error <= 1e-5 else 1


def _cmd_profile_oracle(args):
    epsilons = [float(tok) for tok in args.epsilons.split(",") if tok]
    rows = verify.profile_coefficient(epsilons, n_intervals=args.intervals,
                                      span_factor=args.span,
                                      potential=args.potential)
    print("epsilon,energy_per_unit_interface")
    for eps, energy in rows:
        print(f"{eps!r},{energy!r}")
    return 0


def _cmd_render(args):
    data = np.load(args.artifacts)
    mesh = Mesh(data["nodes"], data["triangles"], data["dirichlet_nodes"],
                data["target_elements"], float(data["cell_size"]))
    design = DesignField(data["rho2"], data["rho3"])
    j = args.case - 1
    s = data["s"]
    u = data["u"]
    if not 0 <= j < s.shape[0]:
        raise MorphoptError(f"case {args.case} out of range (1..{s.shape[0]})")
    composite_export(mesh, design, s[j], u[j], scale=args.scale,
                     path=args.out, width=args.width)
    print(f"written,{args.out}")
    return 0


def _cmd_mesh_info(args):
    spec = _load_spec(args)
    mesh = spec.build_mesh()
    print("key,value")
    print(f"nodes,{mesh.n_nodes}")
    print(f"triangles,{mesh.n_triangles}")
    print(f"area,{mesh.area!r}")
    print(f"cell_size,{mesh.cell_size!r}")
    print(f"dirichlet_nodes,{len(mesh.dirichlet_nodes)}")
    print(f"target_elements,{len(mesh.target_elements)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="morphopt",
        description="Phase-field co-design of material layout and stimulus "
                    "for compliant morphing structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an optimization problem")
    p_run.add_argument("--config", required=True,
                       help="config file path or shipped config name")
    p_run.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override a config value (section.key=value)")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seed-free", action="store_true",
                       help="assert that the run draws no randomness")
    p_run.set_defaults(func=_cmd_run)

    p_chk = sub.add_parser("check-gradient",
                           help="finite-difference check of both gradients")
    p_chk.add_argument("--config", default=None,
                       help="optional config (default: desk cantilever)")
    p_chk.add_argument("--override", action="append", metavar="KEY=VALUE")
    p_chk.add_argument("--h", type=float, default=1.0 / 20.0,
                       help="cell size of the default problem")
    p_chk.add_argument("--trials", type=int, default=20)
    p_chk.add_argument("--delta", type=float, default=1e-6)
    p_chk.add_argument("--seed", type=int, default=0)
    p_chk.set_defaults(func=_cmd_check_gradient)

    p_prof = sub.add_parser("profile-oracle",
                            help="1D optimal-profile perimeter coefficient")
    p_prof.add_argument("--epsilons", default="0.08,0.04,0.02")
    p_prof.add_argument("--intervals", type=int, default=4000)
    p_prof.add_argument("--span", type=float, default=40.0)
    p_prof.add_argument("--potential", choices=("triple", "double"),
                        default="triple")
    p_prof.set_defaults(func=_cmd_profile_oracle)

    p_rnd = sub.add_parser("render",
                           help="composite plot from saved run artifacts")
    p_rnd.add_argument("--artifacts", required=True,
                       help="final_fields.npz from a run")
    p_rnd.add_argument("--case", type=int, default=1)
    p_rnd.add_argument("--scale", type=float, default=1.0)
    p_rnd.add_argument("--width", type=int, default=480)
    p_rnd.add_argument("--out", required=True, help="output .ppm path")
    p_rnd.set_defaults(func=_cmd_render)

    p_info = sub.add_parser("mesh-info", help="mesh statistics for a config")
    p_info.add_argument("--config", required=True)
    p_info.add_argument("--override", action="append", metavar="KEY=VALUE")
    p_info.set_defaults(func=_cmd_mesh_info)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MorphoptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
