"""Iterative vs exhaustive throughput optimization over constellation size."""
import argparse
import math

from leo_outage.figures import fig11
from leo_outage.optimizer import OptConstraints


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--S", type=int, nargs="+", default=[50, 100, 150, 200, 300, 500])
    ap.add_argument("--eta", type=float, default=0.9)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta-theta-deg", type=float, default=0.1)
    args = ap.parse_args()
    cons = OptConstraints(eta=args.eta, epsilon=args.eps, delta_theta=math.radians(args.delta_theta_deg))
    print(f"{'S':>5} {'g_dB':>5} {'we':>4} {'method':>10} {'status':>22} {'R*':>8} {'theta*':>8} {'T':>9} {'ms':>8}")
    for r in fig11(S_values=tuple(args.S), constraints=cons):
        print(
            f"{r['S']:5d} {r['g_db']:5.1f} {r['omega_e_deg']:4.1f} {r['method']:>10} {r['status']:>22} "
            f"{r['R_star']:8.4f} {r['theta_star_deg']:8.3f} {r['T']:9.5f} {r['wall_ms']:8.0f}"
        )


if __name__ == "__main__":
    main()
