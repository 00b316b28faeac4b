"""Graded ranks of the order-two Lazard approximation next to the
polynomial-ring counts, with timings."""

import argparse
import time
from dataclasses import dataclass

from dlring.fgl import lazard_dimensions, thom_dimensions


@dataclass
class Config:
    max_degree: int = 8


def run(cfg: Config) -> bool:
    start = time.perf_counter()
    dims = lazard_dimensions(cfg.max_degree)
    elapsed = time.perf_counter() - start
    want = thom_dimensions(cfg.max_degree)
    print(f"{'degree':>6} {'rank':>5} {'count':>5}")
    for d in range(cfg.max_degree + 1):
        print(f"{d:>6} {dims[d]:>5} {want[d]:>5}")
    ok = dims == want
    print(f"{'PASS' if ok else 'FAIL'} in {elapsed:.2f}s")
    return ok


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-degree", type=int, default=Config.max_degree)
    raise SystemExit(0 if run(Config(p.parse_args().max_degree)) else 2)
