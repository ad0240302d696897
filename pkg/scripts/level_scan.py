"""Kernel, cokernel and smallest nonzero singular value of a gallery tower across levels.

    python scripts/level_scan.py shift-2 --levels 8,16,32,64
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from kfredholm import gallery
from kfredholm.fredholm import TOL_RANK, fredholm_check_regular


@dataclass
class ScanConfig:
    name: str = "shift-1"
    levels: tuple = (8, 16, 32, 64)
    tol_rank: float = TOL_RANK
    dim_h: int = 2


def scan(cfg: ScanConfig):
    """One row per level for each path (direct and through F_t)."""
    entry = gallery.get(cfg.name)
    rep = fredholm_check_regular(entry.tower(cfg.levels, cfg.dim_h), cfg.tol_rank)
    rows = []
    for r in (rep, rep.companion):
        for i, N in enumerate(r.levels_checked):
            rows.append({
                "tower": cfg.name, "path": r.path, "N": N,
                "ker": r.ker_dims[i], "coker": r.coker_dims[i],
                "sigma_gap": f"{r.sigma_gaps[i]:.6g}", "norm": f"{r.norms[i]:.6g}",
                "pinv_norm": f"{r.pseudo_inverse_norms[i]:.6g}",
            })
    return rep, rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("name", nargs="?", default=ScanConfig.name, choices=sorted(gallery.BY_NAME))
    p.add_argument("--levels", default="8,16,32,64")
    p.add_argument("--tol-rank", type=float, default=TOL_RANK)
    args = p.parse_args(argv)
    cfg = ScanConfig(args.name, tuple(int(v) for v in args.levels.split(",")), args.tol_rank)
    rep, rows = scan(cfg)
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    print(f"# verdict: fredholm={rep.is_fredholm} index={rep.index} disagreements={len(rep.disagreements)}")


if __name__ == "__main__":
    main()
