"""Self-contained damped least-squares solver.

A compact Levenberg-Marquardt implementation over a user-supplied residual
function. The Jacobian is built by central finite differences, damping
follows the gain-ratio update of Nielsen, and the initial damping is zero so
that linear problems are solved exactly in the first Gauss-Newton step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LMOptions", "LMResult", "levenberg_marquardt"]


@dataclass(frozen=True)
class LMOptions:
    """Termination and damping controls.

    The solver stops when the infinity norm of the gradient drops below
    ``gradient_tol``, when a trial step (accepted or not) changes the cost
    by less than ``cost_tol`` relatively, or after ``max_iterations``
    accepted steps.
    """

    max_iterations: int = 500
    gradient_tol: float = 1e-8
    cost_tol: float = 1e-10
    fd_step: float = 1e-6
    lambda_init: float = 0.0
    lambda_max: float = 1e12


@dataclass
class LMResult:
    params: np.ndarray
    cost: float
    residual_norm: float
    gradient_norm: float
    n_iterations: int
    converged: bool
    message: str
    covariance: np.ndarray = field(repr=False, default=None)
    n_residual_evals: int = 0


def _fd_jacobian(residual_fn, x: np.ndarray, r0_size: int, step: float) -> np.ndarray:
    jac = np.empty((r0_size, x.size))
    for k in range(x.size):
        h = step * max(1.0, abs(x[k]))
        xp = x.copy()
        xp[k] += h
        xm = x.copy()
        xm[k] -= h
        jac[:, k] = (np.asarray(residual_fn(xp)) - np.asarray(residual_fn(xm))) / (2.0 * h)
    return jac


def _clipped_pinv(h: np.ndarray) -> np.ndarray:
    """Pseudo-inverse through an eigendecomposition with small-mode clipping.

    Keeps the covariance symmetric positive semidefinite even when the
    normal matrix is numerically singular along unidentifiable directions.
    """
    hs = 0.5 * (h + h.T)
    vals, vecs = np.linalg.eigh(hs)
    cut = max(vals.max(), 0.0) * 1e-12
    inv = np.where(vals > cut, 1.0 / np.where(vals > cut, vals, 1.0), 0.0)
    return (vecs * inv) @ vecs.T


def levenberg_marquardt(residual_fn, x0, options: LMOptions | None = None) -> LMResult:
    """Minimize 0.5 * sum(residual_fn(x)^2) from the starting point x0.

    Parameters
    ----------
    residual_fn:
        Callable mapping a parameter vector to a 1D residual array. Must be
        finite at ``x0``; non-finite values during iteration are treated as
        a rejected trial step rather than an error.
    x0:
        Initial parameter vector, finite, at least one entry.
    options:
        Termination and damping controls; defaults are fine for the fits in
        this package.

    Returns
    -------
    LMResult
        Never raises for numerical trouble after a valid start: singular
        normal equations increase the damping, and a runaway damping factor
        returns ``converged=False`` with a diagnostic message.
    """
    opt = options or LMOptions()
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if x.size == 0:
        raise ValueError("need at least one free parameter")
    if not np.all(np.isfinite(x)):
        raise ValueError("initial guess must be finite")
    r = np.asarray(residual_fn(x), dtype=float)
    n_evals = 1
    if r.ndim != 1 or not np.all(np.isfinite(r)):
        raise ValueError("residual at the initial guess must be a finite 1D array")
    cost = 0.5 * float(r @ r)
    lam = float(opt.lambda_init)
    nu = 2.0
    n_accepted = 0
    grad_norm = np.inf
    message = "iteration limit reached"
    converged = False
    jac = None

    for _ in range(opt.max_iterations):
        jac = _fd_jacobian(residual_fn, x, r.size, opt.fd_step)
        n_evals += 2 * x.size
        grad = jac.T @ r
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm < opt.gradient_tol:
            converged = True
            message = "gradient tolerance reached"
            break
        hess = jac.T @ jac
        diag_scale = float(np.max(np.diag(hess))) or 1.0

        accepted = False
        while not accepted:
            try:
                step = np.linalg.solve(hess + lam * np.eye(x.size), -grad)
                if not np.all(np.isfinite(step)):
                    raise np.linalg.LinAlgError
            except np.linalg.LinAlgError:
                lam = max(lam * 10.0, 1e-3 * diag_scale)
                if lam > opt.lambda_max:
                    message = "damping overflow on singular normal equations"
                    break
                continue
            r_try = np.asarray(residual_fn(x + step), dtype=float)
            n_evals += 1
            cost_try = 0.5 * float(r_try @ r_try) if np.all(np.isfinite(r_try)) else np.inf
            predicted = -(grad @ step + 0.5 * step @ hess @ step)
            if cost_try < cost:
                gain = (cost - cost_try) / predicted if predicted > 0 else 1.0
                rel_drop = (cost - cost_try) / max(cost, 1e-300)
                x = x + step
                r = r_try
                cost = cost_try
                n_accepted += 1
                lam = lam * max(1.0 / 3.0, 1.0 - (2.0 * gain - 1.0) ** 3)
                nu = 2.0
                accepted = True
                if rel_drop < opt.cost_tol:
                    converged = True
                    message = "relative cost change below tolerance"
            else:
                # A rejected step whose cost matches the current cost to
                # within the relative tolerance means the surface is flat at
                # numerical resolution: no further progress is possible.
                if np.isfinite(cost_try) and \
                        abs(cost_try - cost) < opt.cost_tol * max(cost, 1e-300):
                    converged = True
                    message = "relative cost change below tolerance"
                    break
                lam = lam * nu if lam > 0 else 1e-3 * diag_scale
                nu *= 2.0
                if lam > opt.lambda_max:
                    message = "damping overflow, no acceptable step found"
                    break
        if not accepted or converged:
            break

    if jac is None:
        jac = _fd_jacobian(residual_fn, x, r.size, opt.fd_step)
        n_evals += 2 * x.size
    covariance = _clipped_pinv(jac.T @ jac)
    return LMResult(
        params=x,
        cost=cost,
        residual_norm=float(np.sqrt(2.0 * cost)),
        gradient_norm=grad_norm,
        n_iterations=n_accepted,
        converged=converged,
        message=message,
        covariance=covariance,
        n_residual_evals=n_evals,
    )
