"""Axiom checks for the total squares on N_* and on the free ring, over a
range of sizes. Reports how many coefficients each axiom actually compared,
since at small sizes the symmetry axiom has little to check."""

import argparse
import time
from dataclasses import dataclass, field

from dlring.dring import bo_dring, dring_validate, nstar_total_square
from dlring.fgl import additive_fgl, lazard_ring


@dataclass
class Config:
    nstar_degrees: list[int] = field(default_factory=lambda: [4, 6, 8])
    bo_sizes: list[int] = field(default_factory=lambda: [1, 2, 3])
    lazard_degree: int = 3


def _line(label: str, ts) -> bool:
    start = time.perf_counter()
    report = dring_validate(ts)
    counts = " ".join(f"{n}={a.checked}{'' if a.passed else '!'}" for n, a in report.axioms.items())
    print(f"{label:<24} {'PASS' if report.passed else 'FAIL'} {counts} ({time.perf_counter() - start:.2f}s)")
    return report.passed


def run(cfg: Config) -> bool:
    ok = True
    for D in cfg.nstar_degrees:
        ok &= _line(f"nstar Dmax={D}", nstar_total_square(D))
    _, F = lazard_ring(cfg.lazard_degree)
    for K in cfg.bo_sizes:
        ok &= _line(f"bo additive K={K}", bo_dring(additive_fgl(2 * K), K))
        ok &= _line(f"bo lazard:{cfg.lazard_degree} K={K}", bo_dring(F, K))
    return ok


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nstar", type=int, nargs="*", default=Config().nstar_degrees)
    p.add_argument("--bo", type=int, nargs="*", default=Config().bo_sizes)
    a = p.parse_args()
    raise SystemExit(0 if run(Config(a.nstar, a.bo)) else 2)
