"""How fast the smallest singular value of a compact diagonal shrinks with the level.

For g(n) = 1/(n+1) the smallest singular value of the N-section is exactly
1/N, so going from N to 4N shrinks it by 4x.  Faster-decaying symbols shrink
faster; this script tabulates the ratio for a few of them.

    python scripts/gap_decay.py --levels 16,32,64
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from kfredholm.fredholm import fredholm_check_bounded
from kfredholm.towers import Diagonal, OperatorTower, Symbol


@dataclass
class DecayConfig:
    symbols: list = field(default_factory=lambda: ["1/(n+1)", "1/(n+1)**2", "1/sqrt(n+1)"])
    levels: tuple = (16, 32, 64)


def run(cfg: DecayConfig):
    out = []
    for s in cfg.symbols:
        rep = fredholm_check_bounded(OperatorTower(Diagonal(Symbol(s, "values")), cfg.levels))
        gaps = rep.sigma_gaps
        out.append((s, gaps, gaps[0] / gaps[-1], rep.is_fredholm, rep.closed_range))
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--levels", default="16,32,64")
    args = p.parse_args(argv)
    cfg = DecayConfig(levels=tuple(int(v) for v in args.levels.split(",")))
    print("symbol,levels,sigma_gaps,shrink_first_to_last,is_fredholm,closed_range")
    for s, gaps, ratio, fred, closed in run(cfg):
        g = " ".join(f"{x:.4g}" for x in gaps)
        print(f"{s},{'/'.join(map(str, cfg.levels))},{g},{ratio:.3f},{fred},{closed}")


if __name__ == "__main__":
    main()
