"""Smallest eigenvalue of 1 - F_N* F_N across levels.

Bounded towers keep it away from zero; unbounded ones drive it to zero like
1 / (1 + ||T_N||^2), which is why the bounded transform is the right object to
run the Fredholm criterion on.

    python scripts/defect_floor.py --levels 8,16,32,64,128
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from kfredholm import gallery
from kfredholm.regular import defect_floor


@dataclass
class FloorConfig:
    levels: tuple = (8, 16, 32, 64, 128)
    names: tuple = ("shift-1", "scalar-3", "diagonal-n", "weighted-shift-n", "creation-sqrt-n")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--levels", default="8,16,32,64,128")
    args = p.parse_args(argv)
    cfg = FloorConfig(levels=tuple(int(v) for v in args.levels.split(",")))
    print("tower,unbounded," + ",".join(f"N={N}" for N in cfg.levels))
    for name in cfg.names:
        g = gallery.get(name)
        floors = defect_floor(g.tower(cfg.levels))
        print(f"{name},{g.unbounded}," + ",".join(f"{v:.3e}" for v in floors))


if __name__ == "__main__":
    main()
