"""Dense mixed-integer linear programming by two-phase simplex and
branch-and-bound.

The simplex works on the bounded standard form min c.y, A y = b,
0 <= y <= u after shifting lower bounds to zero and appending one slack per
inequality row.  Nonbasic variables may sit at either bound; the ratio test
treats a bound flip of the entering variable as a candidate blocking
constraint.  Pricing is Dantzig's rule with an automatic switch to Bland's
lowest-index rule during degenerate stalls, so solves stay deterministic
and cannot cycle.

Branch-and-bound explores nodes best-bound-first, branching on the most
fractional variable.  Node relaxations of cardinality-linked problems are
solved over the weight block only (indicators are implied), halving the
tableau.  A rounding heuristic runs at every node and, for problems with
homogeneous constraints, integer rescalings of the root vertex are tried as
warm incumbents; cardinality indicator variables created by
``add_cardinality`` are recomputed rather than rounded.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field, replace

import numpy as np

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"

FEAS_TOL = 1e-7
INT_TOL = 1e-6
PIVOT_TOL = 1e-9
DEFAULT_NODE_LIMIT = 10 ** 6
_STALL_LIMIT = 100  # degenerate steps before Bland pricing takes over


@dataclass(frozen=True)
class LinearProgram:
    """min c.x subject to A_eq x = b_eq, A_ub x <= b_ub, lb <= x <= ub."""

    c: np.ndarray
    a_eq: np.ndarray = None
    b_eq: np.ndarray = None
    a_ub: np.ndarray = None
    b_ub: np.ndarray = None
    lb: np.ndarray = None
    ub: np.ndarray = None
    integrality: tuple = None
    # (x_index, z_index, cap) triples recorded by add_cardinality
    cardinality_links: tuple = ()

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = c.size
        object.__setattr__(self, "c", c)

        def mat(a, b, aname):
            if a is None:
                return np.zeros((0, n)), np.zeros(0)
            a = np.atleast_2d(np.asarray(a, dtype=float))
            b = np.atleast_1d(np.asarray(b, dtype=float))
            if a.shape != (b.size, n):
                raise ValueError(f"{aname} shape {a.shape} does not match "
                                 f"{b.size} rows x {n} variables")
            return a, b

        a_eq, b_eq = mat(self.a_eq, self.b_eq, "a_eq")
        a_ub, b_ub = mat(self.a_ub, self.b_ub, "a_ub")
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", b_eq)
        object.__setattr__(self, "a_ub", a_ub)
        object.__setattr__(self, "b_ub", b_ub)

        lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float) * np.ones(n)
        ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float) * np.ones(n)
        integrality = tuple(self.integrality) if self.integrality is not None \
            else (CONTINUOUS,) * n
        if len(integrality) != n:
            raise ValueError("integrality length does not match variable count")
        for kind in integrality:
            if kind not in (CONTINUOUS, INTEGER, BINARY):
                raise ValueError(f"unknown integrality mark {kind!r}")
        binary = np.array([k == BINARY for k in integrality])
        lb = np.where(binary, np.maximum(lb, 0.0), lb)
        ub = np.where(binary, np.minimum(ub, 1.0), ub)
        if not np.all(np.isfinite(lb)):
            raise ValueError("lower bounds must be finite")
        if np.any(lb > ub + 1e-12):
            raise ValueError("empty variable range lb > ub")
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)
        object.__setattr__(self, "integrality", integrality)
        object.__setattr__(self, "cardinality_links",
                           tuple(tuple(t) for t in self.cardinality_links))

    @property
    def n_vars(self):
        return self.c.size

    def integer_mask(self):
        return np.array([k != CONTINUOUS for k in self.integrality])


@dataclass(frozen=True)
class Solution:
    status: str            # optimal | infeasible | unbounded | node-limit | stalled
    x: np.ndarray = None
    objective: float = None
    nodes: int = 0

    def __post_init__(self):
        if self.x is not None:
            object.__setattr__(self, "x", np.asarray(self.x, dtype=float))


def _simplex_bounded(a, c, u, basis, at_upper, rhs, tol=PIVOT_TOL,
                     max_iter=None):
    """Bounded-variable simplex on an equality tableau.

    ``a`` is the current tableau (modified in place), ``basis`` the basic
    column per row, ``at_upper`` the nonbasic-at-upper flags and ``rhs`` the
    basic variable values.  Minimizes c.y; returns status string.

    Pricing is Dantzig (most negative reduced cost) while the iteration
    makes progress, switching to Bland's lowest-index rule after a run of
    degenerate steps; Bland cannot cycle, so the hybrid terminates.
    """
    m, ncols = a.shape
    if max_iter is None:
        max_iter = 50 * (m + ncols) + 10_000
    in_basis = np.zeros(ncols, dtype=bool)
    in_basis[basis] = True
    # reduced costs c_j - c_B . B^-1 A_j for the current basis
    red = c - c[basis] @ a
    stall = 0

    for _ in range(max_iter):
        fixed = u <= tol  # zero-range variables can never move
        lower_cand = (~in_basis) & (~at_upper) & (~fixed) & (red < -tol)
        upper_cand = (~in_basis) & at_upper & (~fixed) & (red > tol)
        cand = np.nonzero(lower_cand | upper_cand)[0]
        if cand.size == 0:
            return "optimal"
        if stall >= _STALL_LIMIT:
            j = int(cand[0])
        else:
            j = int(cand[np.argmax(np.abs(red[cand]))])
        from_upper = bool(at_upper[j])
        col = a[:, j]
        direction = -col if from_upper else col
        # basic variable i moves as rhs_i - t * direction_i
        u_basic = u[basis]
        t_best = np.inf
        leave_row = -1
        leave_to_upper = False
        pos = direction > tol
        if np.any(pos):
            ratios = rhs[pos] / direction[pos]
            rows = np.nonzero(pos)[0]
            t_min = np.min(ratios)
            hit = rows[np.abs(ratios - t_min) <= tol]
            r = hit[np.argmin(basis[hit])]
            t_best, leave_row, leave_to_upper = t_min, int(r), False
        neg = (direction < -tol) & np.isfinite(u_basic)
        if np.any(neg):
            ratios = (u_basic[neg] - rhs[neg]) / (-direction[neg])
            rows = np.nonzero(neg)[0]
            t_min = np.min(ratios)
            if t_min < t_best - tol:
                hit = rows[np.abs(ratios - t_min) <= tol]
                r = hit[np.argmin(basis[hit])]
                t_best, leave_row, leave_to_upper = t_min, int(r), True
            elif abs(t_min - t_best) <= tol and leave_row >= 0:
                hit = rows[np.abs(ratios - t_min) <= tol]
                r = int(hit[np.argmin(basis[hit])])
                if basis[r] < basis[leave_row]:
                    leave_row, leave_to_upper = r, True
        t_flip = u[j] if np.isfinite(u[j]) else np.inf
        if t_flip < t_best - tol or (leave_row < 0 and np.isfinite(t_flip)):
            # entering variable flips to its opposite bound; no pivot
            if from_upper:
                rhs += u[j] * col
            else:
                rhs -= u[j] * col
            at_upper[j] = not from_upper
            stall = 0 if t_flip > tol else stall + 1
            continue
        if leave_row < 0:
            return "unbounded"
        t = max(t_best, 0.0)
        stall = 0 if t > tol else stall + 1
        leave = int(basis[leave_row])
        # step the basic values, then re-express the tableau in the new basis;
        # rhs tracks variable values so the row reduction does not touch it
        rhs -= t * direction
        enter_val = (u[j] - t) if from_upper else t
        piv = a[leave_row, j]
        a[leave_row] /= piv
        colj = a[:, j].copy()
        colj[leave_row] = 0.0
        a -= np.outer(colj, a[leave_row])
        rhs[leave_row] = enter_val
        red -= red[j] * a[leave_row]
        basis[leave_row] = j
        in_basis[j] = True
        in_basis[leave] = False
        at_upper[j] = False
        at_upper[leave] = leave_to_upper
    return "stalled"


def _standard_form(p, lb, ub):
    """Shift bounds and append slacks: A y = b, 0 <= y <= u."""
    n = p.n_vars
    me, mu = p.a_eq.shape[0], p.a_ub.shape[0]
    a = np.zeros((me + mu, n + mu))
    a[:me, :n] = p.a_eq
    a[me:, :n] = p.a_ub
    a[me:, n:] = np.eye(mu)
    b = np.concatenate([p.b_eq - p.a_eq @ lb, p.b_ub - p.a_ub @ lb])
    u = np.concatenate([ub - lb, np.full(mu, np.inf)])
    return a, b, u


def solve_lp(p, lb=None, ub=None, feas_tol=FEAS_TOL):
    """Solve the continuous relaxation; deterministic Bland simplex.

    ``lb``/``ub`` override the problem bounds (used by branch-and-bound).
    """
    lb = p.lb if lb is None else lb
    ub = p.ub if ub is None else ub
    if np.any(lb > ub + 1e-12):
        return Solution(status="infeasible", nodes=1)
    a, b, u = _standard_form(p, lb, ub)
    m, ntot = a.shape
    n = p.n_vars

    flip = b < 0
    a[flip] *= -1.0
    b = np.abs(b)
    me = p.a_eq.shape[0]
    # slack columns serve as the starting basis on unflipped inequality rows
    need_art = np.ones(m, dtype=bool)
    need_art[me:] = flip[me:]
    n_art = int(np.sum(need_art))
    tab = np.zeros((m, ntot + n_art))
    tab[:, :ntot] = a
    basis = np.zeros(m, dtype=int)
    k = 0
    for i in range(m):
        if need_art[i]:
            tab[i, ntot + k] = 1.0
            basis[i] = ntot + k
            k += 1
        else:
            basis[i] = n + (i - me)
    at_upper = np.zeros(ntot + n_art, dtype=bool)
    rhs = b.copy()
    u_full = np.concatenate([u, np.full(n_art, np.inf)])

    if n_art:
        c1 = np.zeros(ntot + n_art)
        c1[ntot:] = 1.0
        status = _simplex_bounded(tab, c1, u_full, basis, at_upper, rhs)
        if status == "stalled":
            return Solution(status="stalled", nodes=1)
        if float(np.sum(rhs[basis >= ntot])) > feas_tol:
            return Solution(status="infeasible", nodes=1)
        # pivot lingering zero-valued artificials out; rows with no usable
        # pivot column are linearly dependent and get dropped
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] < ntot:
                continue
            row = np.abs(tab[i, :ntot]) > 1e-8
            row[basis[basis < ntot]] = False
            cand = np.nonzero(row)[0]
            if cand.size == 0:
                keep[i] = False
                continue
            at_lo = cand[~at_upper[cand]]
            j = int(at_lo[0]) if at_lo.size else int(cand[0])
            tab[i] /= tab[i, j]
            colj = tab[:, j].copy()
            colj[i] = 0.0
            tab -= np.outer(colj, tab[i])
            # degenerate pivot: no variable moves, so values are unchanged;
            # the entering variable keeps the value it had at its bound
            if at_upper[j]:
                rhs[i] = u_full[j]
                at_upper[j] = False
            else:
                rhs[i] = 0.0
            basis[i] = j
        tab = tab[keep][:, :ntot]
        rhs = rhs[keep]
        basis = basis[keep]
        at_upper = at_upper[:ntot]
    else:
        tab = tab[:, :ntot]
        at_upper = at_upper[:ntot]

    c2 = np.zeros(ntot)
    c2[:n] = p.c
    status = _simplex_bounded(tab, c2, u, basis, at_upper, rhs)
    if status == "unbounded":
        return Solution(status="unbounded", nodes=1)

    y = np.where(at_upper[:n], u[:n], 0.0)
    mask = basis < n
    y[basis[mask]] = rhs[mask]
    x = y + lb
    # a stalled phase 2 still holds a feasible point, just not a proven
    # optimum; callers must not use its objective as a dual bound
    return Solution(status=status, x=x, objective=float(p.c @ x), nodes=1)


def _feasible(p, x, lb, ub, feas_tol=FEAS_TOL, int_tol=INT_TOL):
    if np.any(x < lb - feas_tol) or np.any(x > ub + feas_tol):
        return False
    if p.a_eq.size and np.max(np.abs(p.a_eq @ x - p.b_eq)) > feas_tol:
        return False
    if p.a_ub.size and np.max(p.a_ub @ x - p.b_ub) > feas_tol:
        return False
    ints = p.integer_mask()
    if np.any(np.abs(x[ints] - np.round(x[ints])) > int_tol):
        return False
    return True


def _round_candidate(p, x, lb, ub):
    """Round integer variables, recompute indicator binaries from links."""
    y = np.clip(x, lb, ub)
    ints = p.integer_mask()
    y[ints] = np.round(y[ints])
    for xi, zi, cap in p.cardinality_links:
        y[zi] = 1.0 if y[xi] > 0.5 * INT_TOL else 0.0
    return np.clip(y, lb, ub)


def _scaling_candidates(p, x):
    """Integer rescalings k*x of a root vertex of a homogeneous problem.

    Valid when b_eq = 0 and b_ub <= 0: scaling a feasible point by k >= 1
    preserves every row, so only bounds and integrality need rechecking.
    Indicator binaries from cardinality links are recomputed, not scaled.
    """
    if p.b_eq.size and np.max(np.abs(p.b_eq)) > FEAS_TOL:
        return
    if p.b_ub.size and np.max(p.b_ub) > FEAS_TOL:
        return
    z_idx = {zi for _, zi, _ in p.cardinality_links}
    scale_mask = np.array([i not in z_idx for i in range(p.n_vars)])
    for k in range(1, 49):
        y = x.copy()
        y[scale_mask] = k * x[scale_mask]
        yield _round_candidate(p, y, p.lb, p.ub)


def _cardinality_block(p):
    """Weight-block subproblem of a fully cardinality-linked problem.

    Applies when every variable is either a weight x_i or its indicator
    z_i, and each z_i appears only in its link row x_i - cap_i z_i <= 0
    and in the objective with coefficient alpha_i >= 0.  Returns
    (base, caps, alpha) where ``base`` drops the z columns and link rows,
    or None when the structure is absent.
    """
    links = p.cardinality_links
    nx = len(links)
    n = p.n_vars
    reducible = (
        nx > 0 and n == 2 * nx
        and all(l == (i, nx + i, l[2]) for i, l in enumerate(links))
        and p.a_ub.shape[0] >= nx
        and np.all(p.c[nx:] >= 0.0)
        and (not p.a_eq.size or not np.any(p.a_eq[:, nx:]))
        and not np.any(p.a_ub[:-nx, nx:])
        and np.allclose(p.a_ub[-nx:, :nx], np.eye(nx))
        and np.allclose(p.a_ub[-nx:, nx:],
                        -np.diag([l[2] for l in links]))
        and np.max(np.abs(p.b_ub[-nx:]), initial=0.0) == 0.0
    )
    if not reducible:
        return None
    caps = np.array([l[2] for l in links], dtype=float)
    alpha = p.c[nx:]
    base = LinearProgram(
        c=p.c[:nx].copy(),
        a_eq=p.a_eq[:, :nx].copy(), b_eq=p.b_eq.copy(),
        a_ub=p.a_ub[:-nx, :nx].copy(), b_ub=p.b_ub[:-nx].copy(),
        lb=p.lb[:nx].copy(), ub=p.ub[:nx].copy(),
        integrality=p.integrality[:nx])
    return base, caps, alpha


def _relaxation_solver(p, feas_tol):
    """LP-relaxation solver for branch-and-bound nodes.

    On cardinality-linked problems (see _cardinality_block) the relaxation
    restricted to any node box solves over the x block alone: the optimal
    indicator is z_i = max(lz_i, x_i/cap_i), so a z branched to 1
    contributes a constant, a z branched to 0 forces x_i = 0, and a free z
    adds alpha_i/cap_i to the x_i cost.  This shrinks the tableau by half
    its columns and all link rows.  Falls back to the plain solve when the
    structure is absent.
    """
    blk = _cardinality_block(p)
    if blk is None:
        return lambda lb, ub: solve_lp(p, lb=lb, ub=ub, feas_tol=feas_tol)
    base, caps, alpha = blk
    nx = base.n_vars

    def solve(lb, ub):
        lz, uz = lb[nx:], ub[nx:]
        if np.any((lz > INT_TOL) & (lz < 1.0 - INT_TOL)):
            return solve_lp(p, lb=lb, ub=ub, feas_tol=feas_tol)
        on = lz >= 1.0 - INT_TOL
        cx = base.c + np.where(on, 0.0, alpha / caps)
        sol = solve_lp(replace(base, c=cx), lb=lb[:nx],
                       ub=np.minimum(ub[:nx], caps * uz), feas_tol=feas_tol)
        if sol.status != "optimal":
            return sol
        z = np.clip(np.maximum(lz, sol.x / caps), lz, uz)
        x = np.concatenate([sol.x, z])
        return Solution(status="optimal", x=x, objective=float(p.c @ x),
                        nodes=sol.nodes)

    return solve


def _dive(p, relax, x0, dive_vars, offer, select, max_steps=300,
          int_tol=INT_TOL):
    """Fix-and-dive rounding heuristic.

    Repeatedly picks a fractional dive variable via ``select`` (a key
    function on fractional parts), bounds it to its nearest integer and
    re-solves the relaxation; the opposite rounding is tried once, and a
    variable failing both ways is banned from further fixing.  Feeds any
    integral landing to ``offer``.  Purely primal: produces incumbents,
    never bounds.
    """
    tight = {}
    banned = set()
    x = x0
    for _ in range(max_steps):
        fpart = x[dive_vars] - np.floor(x[dive_vars])
        frac = np.minimum(fpart, 1.0 - fpart)
        open_mask = (frac > int_tol) & np.array(
            [v not in banned for v in dive_vars])
        if not np.any(frac > int_tol):
            offer(x)
            offer(_round_candidate(p, x, p.lb, p.ub))
            return
        if not np.any(open_mask):
            return
        score = np.where(open_mask, select(fpart, frac), -np.inf)
        j = int(dive_vars[np.argmax(score)])
        near = np.round(x[j])
        far = near + (1.0 if near <= x[j] else -1.0)
        for val in (near, far):
            if val < p.lb[j] - 1e-12 or val > p.ub[j] + 1e-12:
                continue
            tight[j] = (val, val)
            lb = p.lb.copy()
            ub = p.ub.copy()
            for v, (l, h) in tight.items():
                lb[v], ub[v] = l, h
            sol = relax(lb, ub)
            if sol.status == "optimal":
                break
        else:
            tight.pop(j, None)
            banned.add(j)
            continue
        x = sol.x


def _feasibility_pump(p, x0, pump_vars, offer, feas_tol, int_tol=INT_TOL,
                      max_pumps=60):
    """Feasibility pump over the integer block (Fischetti et al. style).

    Alternates rounding with an L1 projection back onto the relaxation:
    each pump solves for the feasible point nearest the current rounding
    in the pumped coordinates, via the split x = xr + pos - neg.  Cycles
    break deterministically by flipping the coordinates whose projection
    argues hardest against their rounding, one more per repeat.  Purely
    primal: produces incumbents, never bounds.
    """
    pv = np.asarray(pump_vars, dtype=int)
    keep = np.ones(p.n_vars, dtype=bool)
    keep[pv] = False
    other = np.nonzero(keep)[0]
    a_eq = np.hstack([p.a_eq[:, pv], -p.a_eq[:, pv], p.a_eq[:, other]]) \
        if p.a_eq.size else np.zeros((0, 2 * pv.size + other.size))
    a_ub = np.hstack([p.a_ub[:, pv], -p.a_ub[:, pv], p.a_ub[:, other]]) \
        if p.a_ub.size else np.zeros((0, 2 * pv.size + other.size))
    c = np.concatenate([np.ones(2 * pv.size), np.zeros(other.size)])
    zeros = np.zeros(pv.size)

    xr = np.round(np.clip(x0[pv], p.lb[pv], p.ub[pv]))
    seen = set()
    for _ in range(max_pumps):
        repeat = xr.tobytes() in seen
        seen.add(xr.tobytes())
        aux = LinearProgram(
            c=c, a_eq=a_eq, b_eq=p.b_eq - p.a_eq[:, pv] @ xr,
            a_ub=a_ub, b_ub=p.b_ub - p.a_ub[:, pv] @ xr,
            lb=np.concatenate([zeros, zeros, p.lb[other]]),
            ub=np.concatenate([p.ub[pv] - xr, xr - p.lb[pv], p.ub[other]]))
        sol = solve_lp(aux, feas_tol=feas_tol)
        if sol.status != "optimal":
            return
        y = np.empty(p.n_vars)
        y[pv] = xr + sol.x[:pv.size] - sol.x[pv.size:2 * pv.size]
        y[other] = sol.x[2 * pv.size:]
        cand = _round_candidate(p, y, p.lb, p.ub)
        if offer(cand) or sol.objective <= feas_tol:
            return
        nxt = np.round(y[pv])
        if np.array_equal(nxt, xr) or nxt.tobytes() in seen:
            # flip the most contested coordinates one step toward the
            # projection (away from it when the two already agree)
            d = np.abs(y[pv] - xr)
            order = np.argsort(-d, kind="stable")
            flips = max(1, int(np.sum(d > int_tol)) // 4)
            if repeat:
                flips += len(seen)
            nxt = xr.copy()
            for i in order[:flips]:
                step = 1.0 if y[pv[i]] >= xr[i] else -1.0
                val = xr[i] + step
                if val > p.ub[pv[i]] + 1e-12 or val < p.lb[pv[i]] - 1e-12:
                    val = xr[i] - step
                nxt[i] = np.clip(val, p.lb[pv[i]], p.ub[pv[i]])
        xr = nxt


def solve_mip(p, node_limit=DEFAULT_NODE_LIMIT, feas_tol=FEAS_TOL,
              int_tol=INT_TOL, warm=()):
    """Branch-and-bound over the simplex relaxation.

    Best-bound-first exploration; branching on the most fractional integer
    variable (ties to the lowest index).  ``warm`` supplies candidate
    points offered as incumbents after feasibility checking.  Returns
    status ``node-limit`` with the best incumbent found when the node
    budget runs out, and also when any node relaxation stalled, since the
    optimality proof is then incomplete even if the tree was exhausted.
    """
    ints = np.nonzero(p.integer_mask())[0]
    relax = _relaxation_solver(p, feas_tol)
    root = relax(p.lb, p.ub)
    if root.status != "optimal" or ints.size == 0:
        return root

    nodes = 1
    best_x = None
    best_obj = np.inf
    proof_lost = False

    def offer(x):
        nonlocal best_x, best_obj
        if x is None:
            return False
        if _feasible(p, x, p.lb, p.ub, feas_tol, int_tol):
            obj = float(p.c @ x)
            if obj < best_obj - 1e-12:
                best_x, best_obj = x.copy(), obj
                return True
        return False

    for cand in warm:
        offer(np.asarray(cand, dtype=float))
    offer(_round_candidate(p, root.x, p.lb, p.ub))
    for cand in _scaling_candidates(p, root.x):
        offer(cand)
    z_set = {zi for _, zi, _ in p.cardinality_links}
    dive_vars = np.array([i for i in ints if i not in z_set], dtype=int)
    if dive_vars.size and best_x is None:
        # most-decided-first rounds confident values, largest-first forces
        # weight onto one class at a time; both are cheap, try each
        _dive(p, relax, root.x, dive_vars, offer,
              select=lambda fp, fr: -fr, int_tol=int_tol)
        if best_x is None:
            _dive(p, relax, root.x, dive_vars, offer,
                  select=lambda fp, fr: fp, int_tol=int_tol)
    if best_x is None:
        # pump the weight block when the reduction applies: the aux LPs
        # stay small and the indicators lift as z_i = [x_i > 0]
        blk = _cardinality_block(p)
        if blk is not None:
            base, caps, _ = blk
            sub = replace(base, ub=np.minimum(base.ub, caps))

            def lifted(x):
                z = (x > 0.5 * INT_TOL).astype(float)
                return offer(np.concatenate([x, z]))

            sub_ints = np.nonzero(sub.integer_mask())[0]
            _feasibility_pump(sub, root.x[:base.n_vars], sub_ints, lifted,
                              feas_tol, int_tol)
        else:
            pump_vars = dive_vars if dive_vars.size else ints
            _feasibility_pump(p, root.x, pump_vars, offer, feas_tol, int_tol)

    counter = 0
    heap = [(root.objective, counter, root.x, {})]
    while heap:
        bound, _, x, tight = heapq.heappop(heap)
        if bound >= best_obj - 1e-9:
            break  # best-first: every remaining node is at least as bad
        frac = np.abs(x[ints] - np.round(x[ints]))
        if np.max(frac, initial=0.0) <= int_tol:
            offer(x)
            offer(_round_candidate(p, x, p.lb, p.ub))
            continue
        cand = ints[frac > int_tol]
        j = int(cand[np.argmin(np.abs(x[cand] - np.floor(x[cand]) - 0.5))])
        for child in ((j, "ub", np.floor(x[j])), (j, "lb", np.ceil(x[j]))):
            if nodes >= node_limit:
                status = "node-limit"
                return Solution(status=status, x=best_x,
                                objective=None if best_x is None else best_obj,
                                nodes=nodes)
            var, side, val = child
            t2 = dict(tight)
            lo, hi = t2.get(var, (p.lb[var], p.ub[var]))
            lo, hi = (lo, min(hi, val)) if side == "ub" else (max(lo, val), hi)
            t2[var] = (lo, hi)
            lb = p.lb.copy()
            ub = p.ub.copy()
            for v, (l, h) in t2.items():
                lb[v], ub[v] = l, h
            sol = relax(lb, ub)
            nodes += 1
            if sol.status == "stalled":
                # subtree dropped without a usable bound: whatever the
                # final tree says, optimality is no longer proven
                proof_lost = True
                offer(_round_candidate(p, sol.x, lb, ub))
                continue
            if sol.status != "optimal":
                continue
            offer(_round_candidate(p, sol.x, lb, ub))
            if sol.objective < best_obj - 1e-9:
                counter += 1
                heapq.heappush(heap, (sol.objective, counter, sol.x, t2))
    if best_x is None:
        if proof_lost:
            return Solution(status="node-limit", nodes=nodes)
        return Solution(status="infeasible", nodes=nodes)
    status = "node-limit" if proof_lost else "optimal"
    return Solution(status=status, x=best_x, objective=best_obj, nodes=nodes)


def add_cardinality(p, alpha=0.5, u=None):
    """Append indicator binaries z_i with linking rows x_i <= u_i z_i.

    The objective gains alpha * sum z_i, so solutions trade total weight
    against the number of distinct nonzero entries.  ``u`` caps each x_i
    (defaults to the variable's own finite upper bound).
    """
    n = p.n_vars
    caps = np.asarray(u, dtype=float) * np.ones(n) if u is not None else p.ub.copy()
    if not np.all(np.isfinite(caps)) or np.any(caps <= 0):
        raise ValueError("cardinality caps must be finite and positive")
    c = np.concatenate([p.c, alpha * np.ones(n)])
    a_eq = np.hstack([p.a_eq, np.zeros((p.a_eq.shape[0], n))]) if p.a_eq.size \
        else np.zeros((0, 2 * n))
    a_link = np.hstack([np.eye(n), -np.diag(caps)])
    a_ub = np.vstack([np.hstack([p.a_ub, np.zeros((p.a_ub.shape[0], n))]), a_link]) \
        if p.a_ub.size else a_link
    b_ub = np.concatenate([p.b_ub, np.zeros(n)])
    return LinearProgram(
        c=c,
        a_eq=a_eq, b_eq=p.b_eq.copy(),
        a_ub=a_ub, b_ub=b_ub,
        lb=np.concatenate([p.lb, np.zeros(n)]),
        ub=np.concatenate([np.minimum(p.ub, caps), np.ones(n)]),
        integrality=p.integrality + (BINARY,) * n,
        cardinality_links=tuple((i, n + i, float(caps[i])) for i in range(n)),
    )


def problem_to_json(p):
    return {
        "c": p.c.tolist(),
        "a_eq": p.a_eq.tolist(), "b_eq": p.b_eq.tolist(),
        "a_ub": p.a_ub.tolist(), "b_ub": p.b_ub.tolist(),
        "lb": p.lb.tolist(), "ub": [None if not np.isfinite(v) else v for v in p.ub],
        "integrality": list(p.integrality),
        "cardinality_links": [list(t) for t in p.cardinality_links],
    }


def problem_from_json(data):
    ub = np.array([np.inf if v is None else float(v) for v in data["ub"]])
    return LinearProgram(
        c=np.array(data["c"], dtype=float),
        a_eq=np.array(data["a_eq"], dtype=float).reshape(-1, len(data["c"])),
        b_eq=np.array(data["b_eq"], dtype=float),
        a_ub=np.array(data["a_ub"], dtype=float).reshape(-1, len(data["c"])),
        b_ub=np.array(data["b_ub"], dtype=float),
        lb=np.array(data["lb"], dtype=float), ub=ub,
        integrality=tuple(data["integrality"]),
        cardinality_links=tuple(tuple(t) for t in data.get("cardinality_links", [])),
    )


def dump_problem(p, path):
    with open(path, "w") as fh:
        json.dump(problem_to_json(p), fh)


def load_problem(path):
    with open(path) as fh:
        return problem_from_json(json.load(fh))
