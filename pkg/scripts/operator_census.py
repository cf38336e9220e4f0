#!/usr/bin/env python3
"""Census of the contact-chart operators: sizes, ranks and measured orders.

Builds the truncated complex on the standard contact chart, prints the
per-degree matrix shapes and exact ranks, verifies that consecutive
operators compose to zero, and classifies each operator's differential
order by iterated commutators with coordinate multiplications.

    python scripts/operator_census.py [--n 2] [--max-weight 6]
"""

import argparse
import time

from cscx.contact import standard_contact_chart
from cscx.grading import weight_truncation
from cscx.rumin import contact_two_step, operator_order, rumin_complex


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--max-weight", type=int, default=6)
    args = parser.parse_args()

    cc = standard_contact_chart(args.n)
    struct = contact_two_step(cc)
    t0 = time.monotonic()
    mats = rumin_complex(cc, weight_truncation(args.max_weight))
    print(f"n={args.n}, weight <= {args.max_weight}  (assembled in {time.monotonic() - t0:.1f}s)")
    print(f"{'k':>3} {'shape':>12} {'rank':>6} {'order':>6} {'next.this = 0':>14}")
    for k, matrix in enumerate(mats):
        zero = "-"
        if k + 1 < len(mats):
            zero = str(mats[k + 1].compose(matrix).is_zero())
        order = operator_order(struct, k)
        print(f"{k:>3} {str(matrix.shape):>12} {matrix.rank():>6} {order:>6} {zero:>14}")


if __name__ == "__main__":
    main()
