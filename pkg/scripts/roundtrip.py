"""Curvature round trips for a list of model tuples.

    python scripts/roundtrip.py 5 0,-1 --mode wilczynski
    python scripts/roundtrip.py 7 1,2,3,4 --backend float
"""
import argparse
import json

from rank2dist.exactalg.scalars import rat, to_json
from rank2dist.jacobi import curvature_roundtrip


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("n", type=int)
    ap.add_argument("r", help="comma separated rationals, e.g. 1/2,0,-3")
    ap.add_argument("--mode", choices=("velocity", "wilczynski"), default="velocity")
    ap.add_argument("--backend", choices=("exact", "float"), default="exact")
    ap.add_argument("--order", type=int, default=None)
    args = ap.parse_args()
    r = [rat(x) for x in args.r.split(",")]
    rt = curvature_roundtrip(args.n, r, args.mode, args.backend, K=args.order)
    out = rt.to_json()
    out["matches_input"] = all(abs(float(a) - float(b)) <= 1e-9 for a, b in zip(rt.constants(), r))
    out["r"] = [to_json(x) for x in r]
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
