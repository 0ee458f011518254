"""1D diagonal-norm SBP operators on the reference interval [-1, 1].

Two families are provided:

* Legendre-Gauss-Lobatto collocation (the derivative matrix of the nodal
  DG spectral element method), exact for polynomials up to the chosen degree.
* An equispaced finite-difference operator with fourth-order interior
  stencil and second-order boundary closure, requiring at least 13 nodes.

Both satisfy the summation-by-parts identity Q + Q^T = B with Q = M D and
B = diag(-1, 0, ..., 0, 1), which is what every discretization in this
package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LGL = "lgl"
FDSBP = "fdsbp"

# Diagonal-norm closure of the classical 4th-order interior / 2nd-order
# boundary finite-difference operator.  The exact rational values are less
# important than the structure: the test suite validates the SBP identity
# and the accuracy conditions rather than trusting the transcription.
_FD_NORM_CLOSURE = np.array([17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0])
_FD_Q_CLOSURE = np.array(
    [
        [-1.0 / 2.0, 59.0 / 96.0, -1.0 / 12.0, -1.0 / 32.0, 0.0, 0.0],
        [-59.0 / 96.0, 0.0, 59.0 / 96.0, 0.0, 0.0, 0.0],
        [1.0 / 12.0, -59.0 / 96.0, 0.0, 59.0 / 96.0, -1.0 / 12.0, 0.0],
        [1.0 / 32.0, 0.0, -59.0 / 96.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
    ]
)
_FD_Q_INTERIOR = np.array([1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0])


@dataclass(frozen=True)
class SbpOperator1D:
    """A first-derivative SBP operator: nodes, diagonal mass, and D/Q/S/B."""

    kind: str
    nodes: np.ndarray    # strictly increasing, nodes[0] = -1, nodes[-1] = +1
    weights: np.ndarray  # diagonal mass entries, all positive, sum to 2
    D: np.ndarray
    Q: np.ndarray        # M @ D
    S: np.ndarray        # Q - Q^T, skew-symmetric by construction
    B: np.ndarray        # diag(-1, 0, ..., 0, 1)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def degree(self) -> int:
        """Polynomial degree (node count minus one)."""
        return self.nodes.shape[0] - 1


def _legendre(n: int, x: np.ndarray):
    """Legendre polynomial P_n with first and second derivatives at x."""
    p_prev = np.ones_like(x)
    p = x.copy()
    dp_prev = np.zeros_like(x)
    dp = np.ones_like(x)
    ddp_prev = np.zeros_like(x)
    ddp = np.zeros_like(x)
    if n == 0:
        return p_prev, dp_prev, ddp_prev
    for k in range(2, n + 1):
        p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp_next = dp_prev + (2 * k - 1) * p
        ddp_next = ddp_prev + (2 * k - 1) * dp
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        ddp_prev, ddp = ddp, ddp_next
    return p, dp, ddp


def _lgl_nodes(degree: int, tol: float = 1e-15, max_iter: int = 100) -> np.ndarray:
    """Roots of (1 - x^2) P'_N(x) by Newton iteration from Chebyshev-Lobatto."""
    n = degree
    x = np.empty(n + 1)
    x[0], x[-1] = -1.0, 1.0
    if n >= 2:
        xi = -np.cos(np.pi * np.arange(1, n) / n)
        for _ in range(max_iter):
            _, dp, ddp = _legendre(n, xi)
            g = (1.0 - xi**2) * dp
            gp = -2.0 * xi * dp + (1.0 - xi**2) * ddp
            delta = g / gp
            xi = xi - delta
            if np.max(np.abs(delta)) < tol:
                break
        x[1:-1] = xi
    return x


def _lagrange_derivative_matrix(nodes: np.ndarray) -> np.ndarray:
    """Collocation derivative matrix via barycentric weights."""
    n = nodes.shape[0]
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = (bary[j] / bary[i]) / (nodes[i] - nodes[j])
    # negative-sum trick keeps the constant in the null space to roundoff
    np.fill_diagonal(d, -np.sum(d, axis=1))
    return d


def _boundary_matrix(n: int) -> np.ndarray:
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return b


def build_lgl_operator(poly_degree: int) -> SbpOperator1D:
    """Legendre-Gauss-Lobatto collocation operator of the given degree."""
    if poly_degree < 1:
        raise ValueError("poly_degree must be >= 1 (a 1-node operator has no derivative)")
    nodes = _lgl_nodes(poly_degree)
    p_n, _, _ = _legendre(poly_degree, nodes)
    weights = 2.0 / (poly_degree * (poly_degree + 1) * p_n**2)
    d = _lagrange_derivative_matrix(nodes)
    q = weights[:, None] * d
    return SbpOperator1D(
        kind=LGL,
        nodes=nodes,
        weights=weights,
        D=d,
        Q=q,
        S=q - q.T,
        B=_boundary_matrix(poly_degree + 1),
    )


def build_fd_sbp_operator(n_nodes: int) -> SbpOperator1D:
    """Equispaced 4th-order (interior) SBP finite-difference operator."""
    if n_nodes < 13:
        raise ValueError("the 2-4 diagonal-norm closure needs at least 13 nodes")
    n = n_nodes
    h = 2.0 / (n - 1)
    nodes = -1.0 + h * np.arange(n)
    nodes[-1] = 1.0
    norm = np.ones(n)
    norm[:4] = _FD_NORM_CLOSURE
    norm[-4:] = _FD_NORM_CLOSURE[::-1]
    weights = h * norm
    q = np.zeros((n, n))
    for j in range(4, n - 4):
        q[j, j - 2 : j + 3] = _FD_Q_INTERIOR
    q[:4, :6] = _FD_Q_CLOSURE
    q[-4:, -6:] = -_FD_Q_CLOSURE[::-1, ::-1]
    d = q / weights[:, None]
    return SbpOperator1D(
        kind=FDSBP,
        nodes=nodes,
        weights=weights,
        D=d,
        Q=q,
        S=q - q.T,
        B=_boundary_matrix(n),
    )


@dataclass(frozen=True)
class ValidationReport:
    """Maximum violations of the structural SBP invariants of one operator."""

    kind: str
    n_nodes: int
    sbp_identity: float          # max |Q + Q^T - B|
    skew_symmetry: float         # max |S + S^T|
    weights_sum: float           # |sum(w) - 2|
    weights_min: float           # smallest weight (should be > 0)
    derivative_of_constant: float
    derivative_of_linear: float
    endpoint_error: float        # max(|x_0 + 1|, |x_N - 1|)
    poly_exactness: dict         # degree -> scaled max error of D x^k
    poly_exactness_interior: dict  # fdsbp only: interior rows

    def lines(self) -> list[str]:
        out = [
            f"kind={self.kind} n_nodes={self.n_nodes}",
            f"max |Q+Q^T-B|      : {self.sbp_identity:.3e}",
            f"max |S+S^T|        : {self.skew_symmetry:.3e}",
            f"|sum(w)-2|         : {self.weights_sum:.3e}",
            f"min weight         : {self.weights_min:.6e}",
            f"max |D@1|          : {self.derivative_of_constant:.3e}",
            f"max |D@x - 1|      : {self.derivative_of_linear:.3e}",
            f"endpoint error     : {self.endpoint_error:.3e}",
        ]
        poly = ", ".join(f"k={k}: {v:.2e}" for k, v in sorted(self.poly_exactness.items()))
        out.append(f"poly exactness     : {poly}")
        if self.poly_exactness_interior:
            poly_i = ", ".join(
                f"k={k}: {v:.2e}" for k, v in sorted(self.poly_exactness_interior.items())
            )
            out.append(f"  (interior rows)  : {poly_i}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _poly_errors(op: SbpOperator1D, degrees, rows=None) -> dict:
    errs = {}
    x = op.nodes
    for k in degrees:
        exact = k * x ** (k - 1) if k >= 1 else np.zeros_like(x)
        approx = op.D @ x**k
        err = np.abs(approx - exact)
        if rows is not None:
            err = err[rows]
        errs[k] = float(np.max(err)) / max(1.0, float(k))
    return errs


def verify_sbp(op: SbpOperator1D) -> ValidationReport:
    """Measure every structural invariant; reports, never raises."""
    n = op.n_nodes
    b = _boundary_matrix(n)
    ones = np.ones(n)
    if op.kind == LGL:
        poly = _poly_errors(op, range(0, op.degree + 1))
        poly_interior = {}
    else:
        poly = _poly_errors(op, range(0, 3))
        interior_rows = slice(4, n - 4)
        poly_interior = _poly_errors(op, range(0, 5), rows=interior_rows)
    return ValidationReport(
        kind=op.kind,
        n_nodes=n,
        sbp_identity=float(np.max(np.abs(op.Q + op.Q.T - b))),
        skew_symmetry=float(np.max(np.abs(op.S + op.S.T))),
        weights_sum=float(abs(np.sum(op.weights) - 2.0)),
        weights_min=float(np.min(op.weights)),
        derivative_of_constant=float(np.max(np.abs(op.D @ ones))),
        derivative_of_linear=float(np.max(np.abs(op.D @ op.nodes - ones))),
        endpoint_error=float(max(abs(op.nodes[0] + 1.0), abs(op.nodes[-1] - 1.0))),
        poly_exactness=poly,
        poly_exactness_interior=poly_interior,
    )
