"""Desk-scale cantilever co-design, both schemes.

The target box near the free end is steered toward the displacement
(0, 1).  The staggered scheme (outer descent on densities, closed-form
stimulus minimization at every accepted iterate) typically reaches a
lower objective in fewer iterations than the monolithic joint descent.
Artifacts land in demo_out/cantilever_<scheme>/.

Note the characteristic end state at this resolution: the optimizer
exploits faint intermediate densities as cheap actuators, so volume
fractions fall well below the initial 30% while tracking improves by
one to two orders of magnitude.
"""

from morphopt.config import load_shipped_config
from morphopt import runner

for scheme in ("staggered", "monolithic"):
    spec = load_shipped_config(
        f"cantilever_desk_{scheme}",
        overrides=["optimizer.max_outer_iters=150"])
    art = runner.run(spec, out_dir=f"demo_out/cantilever_{scheme}")
    first, last = art.history[0], art.history[-1]
    print(f"{scheme}:")
    print(f"  status {art.status} after {last.iteration} iterations")
    print(f"  objective {first.breakdown.total:.4e} -> "
          f"{last.breakdown.total:.4e}")
    print(f"  tracking  {first.breakdown.tracking:.4e} -> "
          f"{last.breakdown.tracking:.4e}")
    print(f"  volume fractions ({last.vol_frac2:.4f}, {last.vol_frac3:.4f})")
    print(f"  history: {art.history_path}")
    print(f"  composite: {art.composite_paths[0]}")
