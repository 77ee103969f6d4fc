"""Constrained total least squares for dictionary mismatch.

Given measurements y ~= Phi(g) x taken at slightly wrong grid coordinates g,
the first-order expansion Phi(g + dg) ~= Phi + sum_j R_j dg_j turns the fit
into a structured TLS problem over the stacked unknown

    u = [D dg; w / sigma_w],

minimized subject to  -y + Phi x + W(x) u = 0  with  W(x) = [H(x), sigma_w I]
and H(x) collecting the derivative action on x (each column of H is the
derivative of the model output with respect to one whitened mismatch
coordinate). Eliminating u gives the reduced objective

    C(x) = || W(x)^+ (y - Phi x) ||^2,

which is minimized over the complex coefficients x by a damped Newton
recursion; the mismatch estimate is read off the optimal u. The recursion's
gradient/curvature blocks (a, A, B below) come from differentiating C while
treating x and conj(x) as independent; its fixed points are stationary
points of C.

``real_constrained_u`` solves the side problem of the minimum-norm stacked
unknown when the mismatch block is constrained to be real and x is held
fixed; it is a standalone operation, not part of the main recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .dictionary import AtomBundle
from .numerics import (
    RCOND_FLOOR,
    FullRowRankError,
    SingularSystemError,
    as_matrix,
    as_vector,
    least_squares_solve,
    right_pseudoinverse_apply,
)

__all__ = [
    "CtlsSettings",
    "CtlsProblem",
    "CtlsSolution",
    "make_problem",
    "sigma_w_floor",
    "assemble_H",
    "assemble_Wx",
    "ctls_penalty",
    "ctls_newton",
    "real_constrained_u",
]


def sigma_w_floor(y) -> float:
    """Suggested noise-scale floor for (nearly) noise-free data."""
    y = np.asarray(y)
    return 1e-6 * float(np.linalg.norm(y)) / np.sqrt(len(y))


@dataclass
class CtlsSettings:
    """Knobs for building and solving a mismatch problem.

    sigma_delta is the prior scale of the mismatch per coordinate axis
    (scalar, or one value per axis); the whitening is D = I / sigma_delta.
    sigma_w weights the residual block of u; it is a fixed design weight,
    not an estimate of the actual noise level.
    """

    sigma_delta: float | tuple[float, ...] = 0.005
    sigma_w: float = 1.0
    newton_max_iters: int = 20
    newton_tol: float = 1e-9

    def sigma_axis(self, arity: int) -> np.ndarray:
        s = np.atleast_1d(np.asarray(self.sigma_delta, dtype=float))
        if s.size == 1:
            s = np.full(arity, s[0])
        if s.size != arity or np.any(s <= 0):
            raise ValueError("sigma_delta must be positive, scalar or one per axis")
        return s


@dataclass
class CtlsProblem:
    """One mismatch problem over a fixed support.

    Attributes
    ----------
    y : (M,) complex
    atoms : (M, n) complex
        Support atoms Phi at the current grid estimate.
    deriv_cols : (P, M) complex, P = arity * n
        Derivative of atom (j % n) w.r.t. its coordinate (j // n); layout as
        in AtomBundle.
    whitening : (P, P) complex
        Mismatch whitening D (||D dg||^2 is the prior term).
    sigma_w : float, > 0
    """

    y: np.ndarray
    atoms: np.ndarray
    deriv_cols: np.ndarray
    whitening: np.ndarray
    sigma_w: float

    def __post_init__(self):
        self.y = as_vector(self.y, "y")
        self.atoms = as_matrix(self.atoms, "atoms")
        self.deriv_cols = as_matrix(self.deriv_cols, "deriv_cols")
        self.whitening = as_matrix(self.whitening, "whitening")
        m = self.y.shape[0]
        if self.atoms.shape[0] != m or self.deriv_cols.shape[1] != m:
            raise ValueError("row counts of y, atoms, deriv_cols disagree")
        n = self.atoms.shape[1]
        p = self.deriv_cols.shape[0]
        if n == 0 or p % n != 0:
            raise ValueError("deriv_cols rows must be a positive multiple of atom count")
        if self.whitening.shape != (p, p):
            raise ValueError("whitening must be (P, P)")
        if not self.sigma_w > 0:
            raise ValueError(
                "sigma_w must be > 0; for noise-free data use a floor such as "
                f"sigma_w_floor(y) = {sigma_w_floor(self.y):.3e}"
            )
        try:
            self._winv = np.linalg.inv(self.whitening)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("whitening matrix is singular") from exc
        self._owners = np.arange(p) % n

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    @property
    def n_mismatch(self) -> int:
        return self.deriv_cols.shape[0]


def make_problem(y, bundle: AtomBundle, settings: CtlsSettings | None = None) -> CtlsProblem:
    """Build a CtlsProblem from an atom bundle with D = I / sigma_delta per axis."""
    settings = settings or CtlsSettings()
    n = bundle.n_atoms
    sig = settings.sigma_axis(bundle.arity)
    d = np.diag(np.repeat(1.0 / sig, n)).astype(complex)
    return CtlsProblem(
        y=y,
        atoms=bundle.atoms,
        deriv_cols=bundle.deriv_cols,
        whitening=d,
        sigma_w=settings.sigma_w,
    )


@dataclass
class CtlsSolution:
    """Result of one mismatch solve.

    delta_g is the real projection of the complex mismatch estimate (the
    update actually applied to grids); delta_g_complex keeps the raw value.
    penalty is the reduced objective at x; u_hat the stacked unknown there.
    """

    x: np.ndarray
    u_hat: np.ndarray
    delta_g: np.ndarray
    delta_g_complex: np.ndarray
    penalty: float
    newton_iters: int
    converged: bool
    penalty_trace: list[float] = field(default_factory=list)


def assemble_H(g_stacked, d, x) -> np.ndarray:
    """H = G (D^-1 kron I_n) (I_P kron x) from the stacked derivative blocks.

    Parameters
    ----------
    g_stacked : (M, P*n) complex
        Horizontal stack [R_1 ... R_P] of the derivative blocks.
    d : (P, P) complex, invertible whitening
    x : (n,) complex

    Returns
    -------
    h : (M, P) ndarray with H @ (D dg) = (sum_j R_j dg_j) x for every dg.
    """
    g_stacked = as_matrix(g_stacked, "G")
    d = as_matrix(d, "D")
    x = as_vector(x, "x")
    n = x.shape[0]
    p = d.shape[0]
    if d.shape != (p, p) or g_stacked.shape[1] != p * n:
        raise ValueError("G must be (M, P*n) and D (P, P)")
    m = g_stacked.shape[0]
    t = np.empty((m, p), dtype=complex)
    for j in range(p):
        t[:, j] = g_stacked[:, j * n:(j + 1) * n] @ x
    try:
        # H = T D^-1 via a transposed solve, no explicit inverse
        return np.linalg.solve(d.T, t.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("whitening matrix is singular") from exc


def assemble_Wx(h_blocks, sigma_w: float, m: int) -> np.ndarray:
    """Constraint matrix W = [H_1 ... H_k, sigma_w I_M]."""
    if not sigma_w > 0:
        raise ValueError("sigma_w must be > 0")
    blocks = [as_matrix(h, "H") for h in h_blocks]
    for h in blocks:
        if h.shape[0] != m:
            raise ValueError("H block row count must equal M")
    return np.hstack(blocks + [sigma_w * np.eye(m, dtype=complex)])


def _h_matrix(problem: CtlsProblem, x: np.ndarray) -> np.ndarray:
    # column j of T is R_j x = deriv_cols[j] * x[owner(j)]
    t = (problem.deriv_cols * x[problem._owners][:, None]).T
    return t @ problem._winv


class _Eval:
    """Penalty evaluation at one x, with the pieces the Newton step reuses."""

    __slots__ = ("x", "h_mat", "cho", "h", "u", "penalty")

    def __init__(self, problem: CtlsProblem, x: np.ndarray):
        m = problem.y.shape[0]
        self.x = x
        self.h_mat = _h_matrix(problem, x)
        wwh = self.h_mat @ self.h_mat.conj().T + (problem.sigma_w ** 2) * np.eye(m)
        self.cho = sla.cho_factor(wwh)
        self.h = sla.cho_solve(self.cho, problem.atoms @ x - problem.y)
        self.u = -np.concatenate([self.h_mat.conj().T @ self.h, problem.sigma_w * self.h])
        self.penalty = float(np.real(self.u.conj() @ self.u))


def _newton_step(problem: CtlsProblem, ev: _Eval) -> np.ndarray:
    n = problem.n_atoms
    p = problem.n_mismatch
    arity = p // n
    e = problem._winv
    dg = e @ ev.u[:p]
    # first-order corrected dictionary at the implied mismatch
    contrib = (problem.deriv_cols * dg[:, None]).T.reshape(problem.y.shape[0], arity, n)
    b_til = problem.atoms + contrib.sum(axis=1)
    # K[j, owner(j)] = deriv_cols[j]^H h; all other entries vanish
    kvals = problem.deriv_cols.conj() @ ev.h
    k = np.zeros((p, n), dtype=complex)
    k[np.arange(p), problem._owners] = kvals
    top_q = e.conj().T @ k                      # nonzero block of Qtilde
    wq = ev.h_mat @ top_q                       # W @ Qtilde
    s = wq.conj().T @ sla.cho_solve(ev.cho, b_til)
    a_vec = b_til.T @ ev.h.conj()
    a_mat = -s - s.T
    b_mat = (
        wq.conj().T @ sla.cho_solve(ev.cho, wq)
        - top_q.conj().T @ top_q
        + (b_til.conj().T @ sla.cho_solve(ev.cho, b_til)).T
    )
    binv_a = np.linalg.solve(b_mat, a_mat)
    binv_avec = np.linalg.solve(b_mat, a_vec)
    lhs = a_mat.conj() @ binv_a - b_mat.conj()
    rhs = a_vec.conj() - a_mat.conj() @ binv_avec
    return np.linalg.solve(lhs, rhs)


def ctls_penalty(problem: CtlsProblem, x) -> float:
    """Reduced objective ||W(x)^+ (y - Phi x)||^2, rebuilding H from x."""
    x = as_vector(x, "x")
    h = _h_matrix(problem, x)
    w = assemble_Wx([h], problem.sigma_w, problem.y.shape[0])
    u = right_pseudoinverse_apply(w, problem.y - problem.atoms @ x)
    return float(np.real(u.conj() @ u))


def ctls_newton(
    problem: CtlsProblem,
    x0=None,
    max_iters: int = 20,
    tol: float = 1e-9,
) -> CtlsSolution:
    """Minimize the reduced objective over x by damped Newton steps.

    Starts from the plain least-squares fit when x0 is omitted. A raw step
    that does not decrease the penalty is halved up to 20 times; if no
    fraction of it decreases, iteration stops with converged=False.
    Terminates with converged=True when the relative coefficient change
    drops below tol.
    """
    if x0 is None:
        x = least_squares_solve(problem.atoms, problem.y)
    else:
        x = as_vector(x0, "x0")
        if x.shape[0] != problem.n_atoms:
            raise ValueError("x0 length must match atom count")
    ev = _Eval(problem, x)
    trace = [ev.penalty]
    converged = False
    iters = 0
    for _ in range(max_iters):
        try:
            step = _newton_step(problem, ev)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step.view(float))):
            break
        lam = 1.0
        accepted = None
        for _ in range(21):
            cand = x + lam * step
            try:
                ev_cand = _Eval(problem, cand)
            except (np.linalg.LinAlgError, sla.LinAlgError):
                ev_cand = None
            if ev_cand is not None and np.isfinite(ev_cand.penalty) and ev_cand.penalty <= ev.penalty:
                accepted = ev_cand
                break
            lam /= 2.0
        if accepted is None:
            break
        iters += 1
        denom = max(float(np.linalg.norm(x)), 1e-30)
        rel_change = float(np.linalg.norm(accepted.x - x)) / denom
        x, ev = accepted.x, accepted
        trace.append(ev.penalty)
        if rel_change < tol:
            converged = True
            break
    p = problem.n_mismatch
    dg_complex = problem._winv @ ev.u[:p]
    return CtlsSolution(
        x=x,
        u_hat=ev.u,
        delta_g=dg_complex.real.copy(),
        delta_g_complex=dg_complex,
        penalty=ev.penalty,
        newton_iters=iters,
        converged=converged,
        penalty_trace=trace,
    )


def real_constrained_u(w1, w2, z):
    """Minimum-norm stacked unknown with a real first block.

    Solves  min ||u1||^2 + ||u2||^2  subject to  W1 u1 + W2 u2 = z  with
    u1 constrained real and u2 complex. The KKT conditions give
    u1 = Re(W1^H lam), u2 = W2^H lam with the multiplier solving the
    widely linear system  C1 lam + C2 conj(lam) = 2z,
    C1 = W1 W1^H + 2 W2 W2^H, C2 = W1 W1^T. Eliminating conj(lam) through
    C1 (C1 is invertible whenever [W1 W2] has full row rank, C2 generally
    is not when W1 has fewer columns than rows):

        v  = (C1 - C2 conj(C1)^-1 conj(C2))^-1 (z - C2 conj(C1)^-1 conj(z)),
        u1 = 2 Re(W1^H v),   u2 = 2 W2^H v.

    With no W1 columns the problem reduces to the plain minimum-norm
    solution of W2 u2 = z.

    Returns
    -------
    (u1, u2, v) : real (n1,), complex (n2,), complex (M,)
    """
    w1 = as_matrix(w1, "W1")
    w2 = as_matrix(w2, "W2")
    z = as_vector(z, "z")
    m = z.shape[0]
    if w1.shape[0] != m or w2.shape[0] != m:
        raise ValueError("W1, W2, z row counts disagree")
    if w1.shape[1] == 0:
        u2 = right_pseudoinverse_apply(w2, z)
        c = w2 @ w2.conj().T
        try:
            v = 0.5 * np.linalg.solve(c, z)
        except np.linalg.LinAlgError as exc:
            raise FullRowRankError("W2 W2^H numerically singular") from exc
        return np.zeros(0, dtype=float), u2, v
    c1 = w1 @ w1.conj().T + 2.0 * w2 @ w2.conj().T
    c2 = w1 @ w1.T
    if np.linalg.cond(c1) > 1.0 / RCOND_FLOOR:
        raise SingularSystemError(
            "C1 is numerically singular (stacked [W1 W2] lacks full row rank)")
    c1c = c1.conj()
    t = c1 - c2 @ np.linalg.solve(c1c, c2.conj())
    rhs = z - c2 @ np.linalg.solve(c1c, z.conj())
    if np.linalg.cond(t) > 1.0 / RCOND_FLOOR:
        raise SingularSystemError("multiplier system is numerically singular")
    v = np.linalg.solve(t, rhs)
    u1 = 2.0 * np.real(w1.conj().T @ v)
    u2 = 2.0 * (w2.conj().T @ v)
    return u1, u2, v
