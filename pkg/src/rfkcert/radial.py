"""Shooting solver for radial p-Laplacian eigenproblems on balls and annuli.

The radial reduction is integrated in the flux variable w = r^{N-1}|φ'|^{p-2}φ',
which keeps the right-hand side single-valued through Neumann ends:

    φ' = sign(w) (|w| / r^{N-1})^{p'-1},    w' = -λ r^{N-1} |φ|^{p-2} φ.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import ProblemParams

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


DIRICHLET = "dirichlet"
NEUMANN = "neumann"
ROBIN = "robin"

FIRST = "first"
SECOND = "second"


class IntegrationError(RuntimeError):
    pass


class BracketingError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundaryCondition:
    kind: str
    k: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (DIRICHLET, NEUMANN, ROBIN):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == ROBIN and not (self.k is not None and self.k > 0):
            raise ValueError("Robin condition requires k > 0")
        if self.kind != ROBIN and self.k is not None:
            raise ValueError(f"{self.kind} takes no constant")

    @staticmethod
    def dirichlet() -> "BoundaryCondition":
        return BoundaryCondition(DIRICHLET)

    @staticmethod
    def neumann() -> "BoundaryCondition":
        return BoundaryCondition(NEUMANN)

    @staticmethod
    def robin(k: float) -> "BoundaryCondition":
        return BoundaryCondition(ROBIN, k)


@dataclass(frozen=True)
class RadialProblem:
    params: ProblemParams
    r0: float
    r1: float
    bc_inner: BoundaryCondition
    bc_outer: BoundaryCondition
    mode: str = FIRST

    def __post_init__(self) -> None:
        if not (self.r1 > self.r0 >= 0.0):
            raise ValueError(f"need 0 <= r0 < r1, got {self.r0}, {self.r1}")
        if self.r0 == 0.0 and self.bc_inner.kind != NEUMANN:
            raise ValueError("a ball requires the regularity (Neumann) condition at r = 0")
        if self.mode not in (FIRST, SECOND):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class RadialEigenpair:
    lam: float
    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    zero_count: int
    problem: RadialProblem
    r_star: float | None = None
    meta: dict = field(default_factory=dict)


@dataclass
class ShootResult:
    residual: float
    zero_count: int
    r: np.ndarray | None = None
    phi: np.ndarray | None = None
    w: np.ndarray | None = None
    floor_hits: int = 0
    naccept: int = 0
    nreject: int = 0


_REC_CAP = 1 << 17


@njit(cache=True)
def _rk4_step(r, phi, w, h, lam, p, N):
    # classical RK4 on the flux system
    k1p, k1w = _rhs(r, phi, w, lam, p, N)
    k2p, k2w = _rhs(r + 0.5 * h, phi + 0.5 * h * k1p, w + 0.5 * h * k1w, lam, p, N)
    k3p, k3w = _rhs(r + 0.5 * h, phi + 0.5 * h * k2p, w + 0.5 * h * k2w, lam, p, N)
    k4p, k4w = _rhs(r + h, phi + h * k3p, w + h * k3w, lam, p, N)
    return (
        phi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
    )


@njit(cache=True)
def _rhs(r, phi, w, lam, p, N):
    rn = r ** (N - 1.0)
    aw = abs(w)
    if aw > 0.0:
        dphi = (aw / rn) ** (1.0 / (p - 1.0))
        if w < 0.0:
            dphi = -dphi
    else:
        dphi = 0.0
    ap = abs(phi)
    if ap > 0.0:
        dw = -lam * rn * ap ** (p - 1.0)
        if phi < 0.0:
            dw = -dw
    else:
        dw = 0.0
    return dphi, dw


@njit(cache=True)
def _integrate(r0, r1, phi0, w0, lam, p, N, tol_step, record, rbuf, pbuf, wbuf):
    """Adaptive RK4 by step doubling, mixed absolute/relative error tol_step
    per step.  The flux RHS is only Hölder where phi or w vanishes (p != 2)
    and effectively singular at a ball centre, so the estimator can demand
    arbitrarily small steps there; the floor escalates geometrically while
    consecutive steps sit on it, which crosses any such point in O(log) steps
    instead of crawling.  Floor acceptances are counted, not fatal."""
    span = r1 - r0
    h = span / 1024.0
    hmin = 1e-12 * span
    hmax = span / 16.0
    r = r0
    phi = phi0
    w = w0
    zero_count = 0
    prev_sign = 0.0
    if phi > 0.0:
        prev_sign = 1.0
    elif phi < 0.0:
        prev_sign = -1.0
    n = 0
    stride = 1
    naccept = 0
    nreject = 0
    floor_hits = 0
    floor_run = 0
    cap = rbuf.shape[0]
    if record:
        rbuf[0] = r
        pbuf[0] = phi
        wbuf[0] = w
        n = 1
    status = 0
    while r < r1:
        if naccept + nreject > 20_000_000:
            status = 4
            break
        floor = hmin * 2.0 ** floor_run
        if floor > span / 1024.0:
            floor = span / 1024.0
        if h < floor:
            h = floor
        if h > r1 - r:
            h = r1 - r
        p1, w1 = _rk4_step(r, phi, w, h, lam, p, N)
        pa, wa = _rk4_step(r, phi, w, 0.5 * h, lam, p, N)
        p2, w2 = _rk4_step(r + 0.5 * h, pa, wa, 0.5 * h, lam, p, N)
        if p2 != p2 or w2 != w2:
            status = 2
            break
        err = abs(p2 - p1) / (1.0 + abs(p2))
        ew = abs(w2 - w1) / (1.0 + abs(w2))
        if ew > err:
            err = ew
        tol = tol_step
        clean = err <= tol
        if not clean and h > floor * 1.0000001:
            # reject; shrink, but not below the current floor
            nreject += 1
            fac = 0.9 * (tol / err) ** 0.2
            if fac < 0.1:
                fac = 0.1
            h = h * fac
            if h < floor:
                h = floor
            continue
        if not clean:
            floor_hits += 1
            floor_run += 1
        r = r + h
        phi = p2
        w = w2
        sgn = 0.0
        if phi > 0.0:
            sgn = 1.0
        elif phi < 0.0:
            sgn = -1.0
        if sgn != 0.0:
            if prev_sign != 0.0 and sgn != prev_sign:
                zero_count += 1
            prev_sign = sgn
        naccept += 1
        if record and naccept % stride == 0:
            if n >= cap:
                for i in range(cap // 2):
                    rbuf[i] = rbuf[2 * i]
                    pbuf[i] = pbuf[2 * i]
                    wbuf[i] = wbuf[2 * i]
                n = cap // 2
                stride *= 2
            if naccept % stride == 0:
                rbuf[n] = r
                pbuf[n] = phi
                wbuf[n] = w
                n += 1
        if abs(phi) > 1e100 or abs(w) > 1e100:
            if record:
                status = 3
                break
            # homogeneity: rescale the state, signs are unaffected
            scale = abs(phi) + abs(w) ** (1.0 / (p - 1.0))
            phi = phi / scale
            w = w / scale ** (p - 1.0)
        if clean:
            floor_run = 0
            if err > 0.0:
                fac = 0.9 * (tol / err) ** 0.2
                if fac > 4.0:
                    fac = 4.0
                if fac < 0.2:
                    fac = 0.2
                h = h * fac
            else:
                h = h * 4.0
        else:
            # escalated floor, retry larger immediately
            h = hmin * 2.0 ** floor_run
        if h > hmax:
            h = hmax
    if record and n > 0:
        # make sure the right endpoint is stored exactly
        if rbuf[n - 1] < r:
            if n >= cap:
                n = cap - 1
            rbuf[n] = r
            pbuf[n] = phi
            wbuf[n] = w
            n += 1
        else:
            rbuf[n - 1] = r
            pbuf[n - 1] = phi
            wbuf[n - 1] = w
    return status, n, zero_count, phi, w, floor_hits, r, naccept, nreject


_EMPTY = np.zeros(1)


def _start_state(problem: RadialProblem) -> tuple[float, float, float]:
    N = problem.params.N
    if problem.r0 == 0.0:
        return 1e-8 * problem.r1, 1.0, 0.0
    bc = problem.bc_inner
    if bc.kind == DIRICHLET:
        return problem.r0, 0.0, 1.0
    if bc.kind == NEUMANN:
        return problem.r0, 1.0, 0.0
    return problem.r0, 1.0, bc.k * problem.r0 ** (N - 1)


def _outer_residual(problem: RadialProblem, phi_end: float, w_end: float) -> float:
    bc = problem.bc_outer
    if bc.kind == DIRICHLET:
        return phi_end
    if bc.kind == NEUMANN:
        return w_end
    p = problem.params.p
    N = problem.params.N
    term = bc.k * problem.r1 ** (N - 1) * abs(phi_end) ** (p - 1.0)
    return w_end + math.copysign(term, phi_end) if phi_end != 0.0 else w_end


def shoot(
    problem: RadialProblem,
    lam: float,
    record: bool = False,
    tol_step: float = 1e-12,
) -> ShootResult:
    """Integrate from the determined end and return the residual of the
    opposite boundary condition plus the interior sign-change count."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    r_start, phi0, w0 = _start_state(problem)
    if record:
        rbuf = np.empty(_REC_CAP)
        pbuf = np.empty(_REC_CAP)
        wbuf = np.empty(_REC_CAP)
    else:
        rbuf = pbuf = wbuf = _EMPTY
    status, n, zc, phi_end, w_end, floor_hits, r_bad, naccept, nreject = _integrate(
        r_start,
        problem.r1,
        phi0,
        w0,
        lam,
        problem.params.p,
        float(problem.params.N),
        tol_step,
        record,
        rbuf,
        pbuf,
        wbuf,
    )
    if status == 2:
        raise IntegrationError(f"integration produced NaN near r = {r_bad:.6g} (λ = {lam:.6g})")
    if status == 3:
        raise IntegrationError(f"trajectory overflow while recording near r = {r_bad:.6g}")
    if status == 4:
        raise IntegrationError(
            f"step budget exhausted near r = {r_bad:.6g} (λ = {lam:.6g}, "
            f"{naccept} accepted / {nreject} rejected steps)"
        )
    res = _outer_residual(problem, phi_end, w_end)
    if record:
        out = ShootResult(res, zc, rbuf[:n].copy(), pbuf[:n].copy(), wbuf[:n].copy(), floor_hits)
    else:
        out = ShootResult(res, zc, floor_hits=floor_hits)
    out.naccept = naccept
    out.nreject = nreject
    return out


def _scan_brackets(problem, lam_lo, lam_max, ratio):
    """Geometric λ scan; yields (a, b) with a residual sign change."""
    lam = lam_lo
    res = shoot(problem, lam)
    # a sign change already crossed below the scan start would be missed
    while res.zero_count > 0 and lam > 1e-15:
        lam *= 1e-3
        res = shoot(problem, lam)
    trace = [(lam, res.residual)]
    while lam < lam_max:
        nxt = lam * ratio
        r2 = shoot(problem, nxt)
        trace.append((nxt, r2.residual))
        if res.residual == 0.0 or res.residual * r2.residual < 0.0:
            yield lam, nxt, trace
        lam, res = nxt, r2
    raise BracketingError(
        f"no residual sign change up to λ = {lam_max:g}; scan trace tail: {trace[-6:]}"
    )


def _bisect(problem, a, b, rtol):
    """Shrink [a, b] to relative width rtol; returns the bracket.

    The lower end is the side whose trajectory still carries the mode's own
    interior zero count (one more zero appears the instant λ crosses the
    eigenvalue when the terminal boundary zero moves inside).
    """
    fa = shoot(problem, a).residual
    for _ in range(200):
        if b - a <= rtol * b:
            break
        mid = 0.5 * (a + b)
        fm = shoot(problem, mid).residual
        if fa * fm <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return a, b


def _hermite_eval(x, xs, ys, ds):
    """Cubic Hermite interpolation of (ys, ds) at sorted sample nodes xs."""
    idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
    h = xs[idx + 1] - xs[idx]
    h = np.where(h > 0, h, 1.0)
    t = (x - xs[idx]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    y = h00 * ys[idx] + h10 * h * ds[idx] + h01 * ys[idx + 1] + h11 * h * ds[idx + 1]
    dh00 = (6 * t2 - 6 * t) / h
    dh10 = 3 * t2 - 4 * t + 1
    dh01 = (-6 * t2 + 6 * t) / h
    dh11 = 3 * t2 - 2 * t
    dy = dh00 * ys[idx] + dh10 * ds[idx] + dh01 * ys[idx + 1] + dh11 * ds[idx + 1]
    return y, dy


def _dphi_from_w(r, w, p, N):
    rn = r ** (N - 1.0)
    mag = (np.abs(w) / rn) ** (1.0 / (p - 1.0))
    return np.sign(w) * mag


def _build_pair(problem, lam, traj: ShootResult, n_grid: int, meta: dict) -> RadialEigenpair:
    p = problem.params.p
    N = problem.params.N
    rs, phis, ws = traj.r, traj.phi, traj.w
    dphis = _dphi_from_w(rs, ws, p, N)
    grid = np.linspace(rs[0], rs[-1], n_grid)
    phi, dphi = _hermite_eval(grid, rs, phis, dphis)
    scale = np.max(np.abs(phi))
    if scale > 0:
        # fix the sign by the first clearly nonzero sample
        j = int(np.argmax(np.abs(phi) > 0.1 * scale))
        if phi[j] < 0:
            phi, dphi = -phi, -dphi
        phi /= scale
        dphi /= scale
    r_star = None
    if traj.zero_count >= 1:
        sign_flip = np.nonzero(phis[:-1] * phis[1:] < 0)[0]
        if len(sign_flip):
            i = int(sign_flip[0])
            a, b = rs[i], rs[i + 1]
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm, _ = _hermite_eval(np.array([mid]), rs, phis, dphis)
                if phis[i] * fm[0] <= 0:
                    b = mid
                else:
                    a = mid
            r_star = 0.5 * (a + b)
    return RadialEigenpair(lam, grid, phi, dphi, traj.zero_count, problem, r_star, meta)


def solve_first_radial(
    problem: RadialProblem,
    tol: float = 1e-10,
    lam_max: float = 1e6,
    n_grid: int = 8193,
) -> RadialEigenpair:
    """Smallest eigenvalue via bracket scan plus bisection.

    Neumann-Neumann problems return λ = 0 with the constant eigenfunction.
    """
    if problem.bc_inner.kind == NEUMANN and problem.bc_outer.kind == NEUMANN:
        grid = np.linspace(problem.r0 if problem.r0 > 0 else 1e-8 * problem.r1, problem.r1, n_grid)
        return RadialEigenpair(
            0.0, grid, np.ones(n_grid), np.zeros(n_grid), 0, problem, None, {"constant": True}
        )
    a, b, _ = next(_scan_brackets(problem, 1e-4, lam_max, 1.6))
    lam, _hi = _bisect(problem, a, b, tol)
    traj = shoot(problem, lam, record=True)
    if traj.zero_count != 0:
        raise BracketingError(
            f"first bracket converged to a mode with {traj.zero_count} interior zeros"
        )
    meta = {
        "residual": traj.residual,
        "floor_hits": traj.floor_hits,
        "bisection_rtol": tol,
        "nodes": int(len(traj.r)),
    }
    return _build_pair(problem, lam, traj, n_grid, meta)


def solve_second_radial(
    problem: RadialProblem,
    tol: float = 1e-10,
    lam_max: float = 1e6,
    n_grid: int = 8193,
) -> RadialEigenpair:
    """Smallest eigenvalue whose shooting solution has exactly one interior
    sign change; the interior zero radius is reported as r_star."""
    for a, b, _trace in _scan_brackets(problem, 1e-4, lam_max, 1.6):
        root, _hi = _bisect(problem, a, b, tol)
        traj = shoot(problem, root, record=True)
        if traj.zero_count == 1:
            meta = {
                "residual": traj.residual,
                "floor_hits": traj.floor_hits,
                "bisection_rtol": tol,
                "nodes": int(len(traj.r)),
            }
            pair = _build_pair(problem, root, traj, n_grid, meta)
            if pair.r_star is None:
                raise BracketingError("one sign change but no bracketed zero in trajectory")
            return pair
        if traj.zero_count > 1:
            raise BracketingError(
                f"scan skipped the one-zero mode (found {traj.zero_count} zeros at λ={root:g})"
            )
    raise BracketingError("no second radial mode found below λ_max")


def rayleigh_radial(pair: RadialEigenpair, problem: RadialProblem | None = None) -> float:
    """(∫ r^{N-1}|φ'|^p + Robin boundary terms) / ∫ r^{N-1}|φ|^p."""
    if problem is None:
        problem = pair.problem
    p = problem.params.p
    N = problem.params.N
    wgt = pair.r ** (N - 1)
    num = float(np.trapezoid(wgt * np.abs(pair.dphi) ** p, pair.r))
    den = float(np.trapezoid(wgt * np.abs(pair.phi) ** p, pair.r))
    if problem.bc_outer.kind == ROBIN:
        num += problem.bc_outer.k * problem.r1 ** (N - 1) * abs(pair.phi[-1]) ** p
    if problem.bc_inner.kind == ROBIN:
        num += problem.bc_inner.k * problem.r0 ** (N - 1) * abs(pair.phi[0]) ** p
    return num / den
