"""Structure-equation residuals of the canonical frame for several models."""
import json
import sys

from rank2dist.jacobi import verify_frame_relations

CASES = [(5, [0, 0]), (5, [0, -1]), (5, [3, -7]), (6, [1, 0, 0]), (6, [1, -2, 3]), (7, [1, 2, 3, 4])]

if __name__ == "__main__":
    ok = True
    for n, r in CASES:
        rep = verify_frame_relations(n, r)
        ok &= rep.all_zero
        line = {"n": n, "r": r, "all_zero": rep.all_zero, "sign_flip_all_zero": rep.sign_flip_all_zero,
                "he2m": {k: str(v) for k, v in rep.he2m_coeffs.items() if v != 0}}
        print(json.dumps(line))
    sys.exit(0 if ok else 1)
