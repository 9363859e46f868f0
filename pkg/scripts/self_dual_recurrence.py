"""Recurrence period and Krylov growth of the self-dual kicked Ising chain.

For each N prints the smallest p with U^p proportional to the identity, the
Krylov dimension of the all-up state, the largest |h_{n,n-1} - 1|, and the
first step where C_j departs from j.
"""

import argparse

import numpy as np

from floquet_krylov.floquet import build_self_dual, find_period
from floquet_krylov.krylov import amplitudes_chain, arnoldi
from floquet_krylov.observables import slope_fit, spread_complexity
from floquet_krylov.statespace import SpinBasis, parity_sector
from floquet_krylov.states import all_up


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="*", default=list(range(2, 9)))
    parser.add_argument("--sector", choices=["full", "positive-parity"], default="positive-parity")
    args = parser.parse_args()

    print(f"{'N':>3} {'period':>7} {'4N':>4} {'D_K':>5} {'max|h-1|':>10} {'C_j=j until':>12} {'slope':>8}")
    for n in args.sizes:
        basis = SpinBasis(n)
        sector = parity_sector(basis) if args.sector == "positive-parity" else None
        u = build_self_dual(n, sector).matrix
        period = find_period(build_self_dual(n).matrix, 50 * n)
        data = arnoldi(u, all_up(basis, sector))
        C = spread_complexity(amplitudes_chain(data, 4 * data.krylov_dim))
        off = np.flatnonzero(np.abs(C - np.arange(len(C))) > 1e-8)
        until = int(off[0]) - 1 if len(off) else len(C) - 1
        window = max(2, min(10, data.krylov_dim))
        sub_dev = float(np.abs(data.subdiagonal - 1).max()) if data.krylov_dim > 1 else float("nan")
        print(f"{n:>3} {period!s:>7} {4 * n:>4} {data.krylov_dim:>5} {sub_dev:>10.3g} {until:>12} "
              f"{slope_fit(C, window):>8.4f}")


if __name__ == "__main__":
    main()
