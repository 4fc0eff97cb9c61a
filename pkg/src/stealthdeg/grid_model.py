"""Incidence, susceptance and Jacobian matrices of the DC measurement model.

Measurements are the net bus injections plus the branch flows in both
directions, so the Jacobian stacks as H = [A^T diag(b) A; diag(b) A;
-diag(b) A] = J diag(b) A with J = [A; I; -I]^T.  States are the voltage
angles at the non-reference buses.
"""

from dataclasses import dataclass

import numpy as np

from .case_ingest import in_service_branches
from .errors import DisconnectedGridError, ValidationError

RANK_TOL = 1e-9


@dataclass(frozen=True)
class GridModel:
    """Immutable matrix bundle for one case.

    A: l x n reduced incidence matrix (reference column removed).
    b: length-l branch susceptance vector (1/x).
    J: (n+2l) x l stacking matrix.
    H: m x n Jacobian, m = n + 2l.
    """

    A: np.ndarray
    b: np.ndarray
    J: np.ndarray
    H: np.ndarray
    n: int
    l: int
    m: int


@dataclass(frozen=True)
class StructureReport:
    """Connectivity and numerical-rank diagnostics for a model."""

    connected: bool
    n_components: int
    rank: int
    full_rank: bool
    sv_max: float
    sv_min: float
    tol: float


def incidence_matrix(case):
    """Signed branch-bus incidence matrix with the reference column removed.

    Row k carries +1 at the from-bus column and -1 at the to-bus column of
    in-service branch k (file order); the reference bus column is deleted.
    """
    branches = in_service_branches(case)
    pos = case.bus_positions()
    ref_col = pos[case.reference_bus]
    full = np.zeros((len(branches), len(case.buses)))
    for k, br in enumerate(branches):
        full[k, pos[br.from_bus]] = 1.0
        full[k, pos[br.to_bus]] = -1.0
    return np.delete(full, ref_col, axis=1)


def susceptance_diag(case):
    """Branch susceptances b_i = 1/x_i for the in-service branches."""
    xs = np.array([br.reactance_x for br in in_service_branches(case)])
    if np.any(xs == 0.0):
        raise ValidationError("zero reactance on an in-service branch")
    return 1.0 / xs


def jacobian(A, b):
    """Stacking matrix J = [A; I; -I]^T and Jacobian H = J diag(b) A."""
    l, n = A.shape
    J = np.vstack([A.T, np.eye(l), -np.eye(l)])
    H = J @ (b[:, None] * A)
    return J, H


def _connected_components(A):
    """Component count of the branch graph encoded by a reduced incidence.

    The deleted reference column is restored as a virtual node: any row with
    a single nonzero entry joins its bus to the reference.
    """
    l, n = A.shape
    parent = list(range(n + 1))  # node n is the reference

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(l):
        nz = np.flatnonzero(A[k])
        u = nz[0] if nz.size else n
        v = nz[1] if nz.size > 1 else n
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in range(n + 1)})


def check_connectivity_and_rank(model):
    """Graph connectivity plus numerical rank of H via singular values."""
    n_components = _connected_components(model.A)
    sv = np.linalg.svd(model.H, compute_uv=False)
    tol = RANK_TOL * sv[0]
    rank = int(np.sum(sv > tol))
    return StructureReport(
        connected=n_components == 1,
        n_components=n_components,
        rank=rank,
        full_rank=rank == model.n,
        sv_max=float(sv[0]),
        sv_min=float(sv[-1]),
        tol=float(tol),
    )


def build_model(case):
    """Assemble a :class:`GridModel`; reject disconnected branch graphs."""
    A = incidence_matrix(case)
    b = susceptance_diag(case)
    n_components = _connected_components(A)
    if n_components != 1:
        raise DisconnectedGridError(
            f"in-service branch graph has {n_components} components"
        )
    J, H = jacobian(A, b)
    l, n = A.shape
    return GridModel(A=A, b=b, J=J, H=H, n=n, l=l, m=n + 2 * l)
