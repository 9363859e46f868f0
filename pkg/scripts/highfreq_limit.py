"""Arnoldi coefficients of the split-step map against Lanczos of the averaged Hamiltonian.

Prints the median relative deviation of h_{n,n-1}/T from b_n over the first
20 indices for a decade scan in T, and the ratio between successive decades.
"""

import argparse

import numpy as np

from floquet_krylov.floquet import ising_energies
from floquet_krylov.krylov import highfreq_comparison
from floquet_krylov.statespace import SpinBasis, parity_sector, project_operator, total_spin_operator
from floquet_krylov.states import all_up


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=8)
    parser.add_argument("--phi", type=float, default=np.pi / 3)
    parser.add_argument("--periods", type=float, nargs="*", default=[1e-1, 1e-2, 1e-3, 1e-4])
    args = parser.parse_args()

    basis = SpinBasis(args.N)
    sector = parity_sector(basis)
    h0 = project_operator(np.diag(ising_energies(basis, 1.0)).astype(complex), sector).matrix
    field = (np.sin(args.phi) * total_spin_operator(basis, "x").matrix
             + np.cos(args.phi) * total_spin_operator(basis, "z").matrix)
    v = project_operator(field, sector).matrix
    psi0 = all_up(basis, sector)

    previous = None
    print(f"{'T':>8} {'D_K':>5} {'median dev':>12} {'ratio':>8}")
    for T in sorted(args.periods, reverse=True):
        report = highfreq_comparison(h0, v, psi0, T)
        med = report.median_sub_deviation(20)
        ratio = "" if previous is None else f"{previous / med:8.1f}"
        print(f"{T:>8.0e} {report.arnoldi.krylov_dim:>5} {med:>12.3e} {ratio:>8}")
        previous = med


if __name__ == "__main__":
    main()
