"""Print the Kac determinant factorization level by level.

    python scripts/kac_table.py --max-level 3
    python scripts/kac_table.py --max-level 4 --pointwise-above 3
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from fractions import Fraction

from nsverma.exactnum import format_rat, parse_rat
from nsverma.gramkac import expected_h_degree, kac_verify
from nsverma.nsalgebra import dimension_d


@dataclass(frozen=True)
class KacTableConfig:
    max_level: Fraction = Fraction(3)
    pointwise_above: Fraction = Fraction(3)


def rows(cfg: KacTableConfig):
    for twice in range(1, int(2 * cfg.max_level) + 1):
        n = Fraction(twice, 2)
        mode = "symbolic" if n <= cfg.pointwise_above else "pointwise"
        t0 = time.perf_counter()
        fact = kac_verify(n, mode)
        factors = " ".join(f"phi{p}{q}^{e}" for p, q, e in fact.factors)
        yield n, dimension_d(n), expected_h_degree(n), fact.leading, mode, factors, time.perf_counter() - t0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-level", type=parse_rat, default=KacTableConfig.max_level)
    ap.add_argument("--pointwise-above", type=parse_rat, default=KacTableConfig.pointwise_above)
    cfg = KacTableConfig(**{k.replace("-", "_"): v for k, v in vars(ap.parse_args(argv)).items()})
    print(f"{'n':>4} {'d(n)':>5} {'deg_h':>6} {'A_n':>16}  {'mode':<9} factors")
    for n, d, deg, a, mode, factors, secs in rows(cfg):
        print(f"{format_rat(n):>4} {d:>5} {deg:>6} {format_rat(a):>16}  {mode:<9} {factors}  [{secs:.2f}s]")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
