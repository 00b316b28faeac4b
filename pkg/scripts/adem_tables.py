"""Generalized Adem rules derived from a law, compared with the classical
closed form for the additive law."""

import argparse
from dataclasses import dataclass

from dlring.dring import derive_bound, derive_generalized_adem
from dlring.fgl import additive_fgl, lazard_ring
from dlring.qring import adem_expand
from dlring.series import ONE


@dataclass
class Config:
    max_sum: int = 10
    lazard_degree: int = 3


def run(cfg: Config) -> bool:
    bound = derive_bound(cfg.max_sum)
    additive = derive_generalized_adem(additive_fgl(bound), bound)
    _, F = lazard_ring(cfg.lazard_degree)
    universal = derive_generalized_adem(F, bound)
    ok = not additive.unsolved
    for lhs in sorted(additive.rules, key=lambda c: (sum(c), c)):
        if sum(lhs) > cfg.max_sum:
            continue
        want = {m.indices: ONE for m in adem_expand(*lhs).terms}
        match = additive.rules[lhs] == want
        ok &= match
        print(f"{'ok ' if match else 'BAD'} {additive.format_rule(lhs)}")
        if universal.rules.get(lhs) != additive.rules[lhs]:
            print(f"    universal: {universal.format_rule(lhs)}")
    print(f"derivation bound {bound}, unsolved {len(additive.unsolved)}")
    print("PASS" if ok else "FAIL")
    return ok


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-sum", type=int, default=Config.max_sum)
    p.add_argument("--lazard-degree", type=int, default=Config.lazard_degree)
    a = p.parse_args()
    raise SystemExit(0 if run(Config(a.max_sum, a.lazard_degree)) else 2)
