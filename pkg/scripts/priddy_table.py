"""Table of q_n(b_k) for the total square on the free ring b_0, b_1, ...
and the Adem check over a grid of (m, n, k)."""

import argparse
import itertools
from dataclasses import dataclass

from dlring.qring import check_adem_on_priddy, priddy_table


@dataclass
class Config:
    max_n: int = 5
    max_k: int = 3


def run(cfg: Config) -> bool:
    table = priddy_table(cfg.max_n + 2 * cfg.max_k)
    for k in range(cfg.max_k + 1):
        for n in range(cfg.max_n + 1):
            print(f"q_{n}(b_{k}) = {table.ring.format(table.q(n, k))}")
    bad = [c for c in itertools.product(range(cfg.max_n + 1), repeat=2) for k in range(cfg.max_k + 1)
           if not check_adem_on_priddy(*c, k).equal]
    print(f"adem check: {len(bad)} discrepancies")
    return not bad


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-n", type=int, default=Config.max_n)
    p.add_argument("--max-k", type=int, default=Config.max_k)
    a = p.parse_args()
    raise SystemExit(0 if run(Config(a.max_n, a.max_k)) else 2)
