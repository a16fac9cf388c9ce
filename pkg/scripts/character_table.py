"""Compare Gram ranks with multiplicity characters at discrete series points.

    python scripts/character_table.py --m-max 3 --max-level 3
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from fractions import Fraction

from nsverma.exactnum import format_rat, parse_rat
from nsverma.fqs import discrete_series
from nsverma.qseries import mult_character, rank_profile


@dataclass(frozen=True)
class CharacterTableConfig:
    m_max: int = 3
    max_level: Fraction = Fraction(3)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m-max", type=int, default=CharacterTableConfig.m_max)
    ap.add_argument("--max-level", type=parse_rat, default=CharacterTableConfig.max_level)
    args = ap.parse_args(argv)
    cfg = CharacterTableConfig(args.m_max, args.max_level)
    all_ok = True
    for pt in discrete_series(cfg.m_max, dedupe=True):
        series = mult_character(pt.m, pt.p, pt.q, cfg.max_level + Fraction(1, 2)).normalized
        char = [int(series.coefficient(Fraction(t, 2))) for t in range(int(2 * cfg.max_level) + 1)]
        ranks = [r[1] for r in rank_profile(pt.m, pt.p, pt.q, cfg.max_level)]
        ok = ranks == char
        all_ok &= ok
        print(f"m={pt.m} (p,q)=({pt.p},{pt.q}) c={format_rat(pt.c)} h={format_rat(pt.h)}")
        print(f"  rank: {ranks}\n  char: {char}  {'ok' if ok else 'MISMATCH'}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
