"""Spectral summary tables printed to stdout.

Table 1: Morse index of the explicit singular solution U_h at N = 10 over a
         sweep of h, with both routes' eigenvalues and the cross-method gap.
Table 2: Hardy cutoff quotients R_n, the excess n (R_n - H), and the disk
         constant H = j_{0,1}^2.
Table 3: negative-energy witnesses at N = 9, h = 0: disjoint annuli with
         certified Q < 0.
"""

import argparse

from gelfand import (
    explicit_uh,
    hardy_constant,
    hardy_quotient_xi_n,
    instability_witness_leq9,
    morse_index,
    reduce_to_disk,
)


def table_morse(hs):
    print("h        index  eigenvalues (phase route)          method gap")
    for h in hs:
        rep = morse_index(reduce_to_disk(explicit_uh(10, h)))
        idx = f"{rep.morse_index}+" if rep.capped else f"{rep.morse_index}"
        evs = ", ".join(f"{e:.6f}" for e in rep.eigenvalues_below_zero) or "-"
        print(f"{h:<8g} {idx:<6} {evs:<34} {rep.method_gap:.2e}")


def table_hardy(n_max):
    H = hardy_constant()
    print(f"\nH = j01^2 = {H:.12f}")
    print("n    R_n             n(R_n - H)")
    for n in range(1, n_max + 1):
        r = hardy_quotient_xi_n(10, n)
        print(f"{n:<4d} {r:.12f}  {n * (r - H):.6f}")


def table_witness(j_max):
    print("\nj    support (annulus)             Q")
    for j in range(1, j_max + 1):
        w = instability_witness_leq9(9, 0.0, 1.0, j)
        print(f"{j:<4d} [{w.support[0]:.3e}, {w.support[1]:.3e}]  {w.q_value:.9f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, nargs="*",
                    default=[0.0, 5.0, 5.78, 6.0, 31.0, 80.0])
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--j-max", type=int, default=4)
    args = ap.parse_args()
    table_morse(args.h)
    table_hardy(args.n_max)
    table_witness(args.j_max)
