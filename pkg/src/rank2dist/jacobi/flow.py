"""Taylor integration of the characteristic field and transport of the lift."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from ..errors import InputError, TruncationExceeded
from ..exactalg import linalg
from ..exactalg.jet import Jet
from ..exactalg.mpoly import MPoly, PolyVF
from ..exactalg.scalars import convert
from ..models import CotangentSystem, check_annihilator


def _backend_poly(p: MPoly, backend: str) -> MPoly:
    return p if backend == "exact" else p.map_coeffs(float)


def _eval_jet(p: MPoly, point: Sequence[Jet], order: int, zero) -> Jet:
    val = p.evaluate(point)
    if isinstance(val, Jet):
        return val
    return Jet.const(val + zero, order)


@dataclass(frozen=True)
class FlowJet:
    center: tuple
    order: int
    trajectory: tuple  # 2n jets
    psi: tuple  # inverse of the variational matrix, rows of jets
    backend: str = "exact"

    def variational(self) -> List[List[Jet]]:
        """Phi = Psi^{-1}, the linearized flow."""
        return _invert(self.psi)


def _invert(M):
    n = len(M)
    zero = M[0][0].zero
    one = zero + 1
    order = min(x.order for row in M for x in row)
    aug = [list(row) + [Jet.const(one if i == j else zero, order) for j in range(n)] for i, row in enumerate(M)]
    R, piv = linalg.rref(aug, cols=range(n))
    if len(piv) < n:
        raise InputError("variational matrix is singular")
    return [row[n:] for row in R]


def flow_jet(cs: CotangentSystem, point: Sequence, K: int, backend: str = "exact") -> FlowJet:
    """Integral curve of C through ``point`` and Psi with Psi' = -Psi DC, Psi(0) = I."""
    if K < 1:
        raise TruncationExceeded("flow jets need order >= 1")
    check_annihilator(cs, point)
    N = 2 * cs.n
    center = [convert(x, backend) for x in point]
    zero = center[0] - center[0]
    C = [_backend_poly(c, backend) for c in cs.C.comps]
    coeffs = [[c] for c in center]
    for k in range(K):
        z = [Jet(cf) for cf in coeffs]
        vals = [_eval_jet(c, z, k, zero) for c in C]
        for i in range(N):
            coeffs[i].append(vals[i][k] / (k + 1))
    traj = [Jet(cf) for cf in coeffs]
    # A(t) = DC(gamma(t)) as coefficient arrays
    A = [[_eval_jet(c.diff(j), traj, K, zero).coeffs for j in range(N)] for c in C]
    psi = [[[zero + (1 if i == j else 0)] for j in range(N)] for i in range(N)]
    nz = [[(j, A[l][j]) for j in range(N) if any(x != 0 for x in A[l][j])] for l in range(N)]
    for k in range(K):
        for i in range(N):
            row_new = [zero] * N
            for a in range(k + 1):
                b = k - a
                for l in range(N):
                    pa = psi[i][l][a]
                    if pa == 0:
                        continue
                    for j, Alj in nz[l]:
                        if b < len(Alj) and Alj[b] != 0:
                            row_new[j] += pa * Alj[b]
            for j in range(N):
                psi[i][j].append(-row_new[j] / (k + 1))
    Psi = tuple(tuple(Jet(psi[i][j]) for j in range(N)) for i in range(N))
    return FlowJet(tuple(center), K, tuple(traj), Psi, backend)


def flow_residual(cs: CotangentSystem, flow: FlowJet) -> List[Jet]:
    """gamma' - C(gamma), truncated to the order where both sides are known."""
    K = flow.order
    zero = flow.trajectory[0].zero
    C = [_backend_poly(c, flow.backend) for c in cs.C.comps]
    vals = [_eval_jet(c, flow.trajectory, K, zero) for c in C]
    return [g.derivative() - v.truncate(K - 1) for g, v in zip(flow.trajectory, vals)]


def lifted_frame(cs: CotangentSystem, flow: FlowJet) -> List[List[Jet]]:
    """Basis of Psi(t) J(gamma(t)) as a 2n x (n-1) matrix of jets.

    J(lambda) = {v tangent to u1 = u2 = u3 = 0 with d pi(v) in D}; vectors
    are written v = (a X1 + b X2, w) and the three constraints du_i(v) = 0
    are solved over the jet ring.
    """
    n, N = cs.n, 2 * cs.n
    backend = flow.backend
    traj = list(flow.trajectory)
    K = flow.order
    zero = traj[0].zero
    q = traj[:n]
    X1 = [_eval_jet(_backend_poly(c, backend), q, K, zero) for c in cs.X[0].comps]
    X2 = [_eval_jet(_backend_poly(c, backend), q, K, zero) for c in cs.X[1].comps]
    zj = Jet.const(zero, K)
    onej = Jet.const(zero + 1, K)
    # columns of M: (X1, 0), (X2, 0), (0, e_k)
    M = [[X1[i], X2[i]] + [zj] * n for i in range(n)]
    M += [[zj, zj] + [onej if k == i else zj for k in range(n)] for i in range(n)]
    G = [[_eval_jet(_backend_poly(d, backend), traj, K, zero) for d in cs.du(i)] for i in (1, 2, 3)]
    ker = linalg.kernel(linalg.matmul(G, M))
    if len(ker) != n - 1:
        raise InputError(f"lifted distribution has dimension {len(ker)}, expected {n - 1}")
    vecs = [linalg.matvec(M, k) for k in ker]
    pulled = [linalg.matvec(flow.psi, v) for v in vecs]
    return [list(row) for row in zip(*pulled)]
