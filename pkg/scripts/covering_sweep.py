"""Run the covering self test over several seeds and sizes."""

import argparse
from dataclasses import dataclass, field

from dlring.coverings import selftest


@dataclass
class Config:
    seeds: list[int] = field(default_factory=lambda: list(range(5)))
    sizes: list[int] = field(default_factory=lambda: [6, 12, 20])
    trials: int = 200


def run(cfg: Config) -> bool:
    ok = True
    for size in cfg.sizes:
        for seed in cfg.seeds:
            r = selftest(cfg.trials, size, seed)
            failed = [n for n, t in r.laws.items() if t.passed != t.total]
            ok &= r.passed
            print(f"size={size:<3} seed={seed:<3} {'PASS' if r.passed else 'FAIL ' + ','.join(failed)}")
    return ok


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--seeds", type=int, nargs="*", default=Config().seeds)
    p.add_argument("--sizes", type=int, nargs="*", default=Config().sizes)
    a = p.parse_args()
    raise SystemExit(0 if run(Config(a.seeds, a.sizes, a.trials)) else 2)
