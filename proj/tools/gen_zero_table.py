#!/usr/bin/env python3
"""Write a zeta-zeros v1 table of the first COUNT ordinates using mpmath.

The ordinates are independent of the C++ code and serve as reference data for
the pipeline tests. Usage: gen_zero_table.py COUNT OUT [--dps 30]
"""
import argparse
import sys

import mpmath


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("count", type=int)
    ap.add_argument("out")
    ap.add_argument("--dps", type=int, default=30)
    args = ap.parse_args()
    mpmath.mp.dps = args.dps
    ords = []
    with open(args.out + ".partial", "w") as part:
        for n in range(1, args.count + 1):
            g = mpmath.zetazero(n).imag
            s = mpmath.nstr(g, args.dps - 5, strip_zeros=False)
            ords.append(s)
            part.write(s + "\n")
            part.flush()
    # Declared accuracy is well above the working precision of the root finder.
    with open(args.out, "w") as f:
        f.write(f"# zeta-zeros v1 abs_err=1e-20 rh_height={ords[-1]}\n")
        for s in ords:
            f.write(s + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
