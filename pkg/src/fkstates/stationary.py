"""Stationary (p,q)-configurations: search, classification and location."""
import enum
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import twistmap
from .action import DEGENERACY_TOL, action_eval, eigen_sym, grad_array, hess_array
from .configspace import (DEFAULT_TOL, Configuration, OrderRelation, _extended,
                          canonicalize, compare, comparable_with_all_translates,
                          is_cyclically_ordered, on_cone_boundary_of_translates,
                          region_test, same_class, shares_coordinate, unit_rotations)
from .model import GeneratingModel

STATIONARY_TOL = 1e-12
DEDUP_TOL = 1e-8
ACTION_TIE_TOL = 1e-9


class NoConvergence(RuntimeError):
    pass


class NoMinimizerFound(RuntimeError):
    pass


class ExtremalClass(enum.Enum):
    GLOBAL_MIN = "GLOBAL_MIN"
    LOCAL_MIN = "LOCAL_MIN"
    MINIMAX = "MINIMAX"
    INDEX_K = "INDEX_K"


class Location(enum.Enum):
    AT_MINIMIZER = "AT_MINIMIZER"
    AT_MINIMAX = "AT_MINIMAX"
    ORDERED_GAP = "ORDERED_GAP"
    UNORDERED_REGION = "UNORDERED_REGION"
    BOUNDARY_VIOLATION = "BOUNDARY_VIOLATION"
    FORBIDDEN_VIOLATION = "FORBIDDEN_VIOLATION"
    DEGENERATE_UNCLASSIFIED = "DEGENERATE_UNCLASSIFIED"


@dataclass(frozen=True, eq=False)
class StationaryRecord:
    config: Configuration
    grad_residual: float
    eigenvalues: tuple
    index: int
    degenerate: bool
    action: float
    residue: float = None
    symmetric: bool = None
    extremal_class: ExtremalClass = None
    cyclically_ordered: bool = None
    ordered_wrt_M: bool = None
    region: Location = None

    @property
    def label(self):
        if self.extremal_class is ExtremalClass.INDEX_K:
            return f"INDEX_{self.index}"
        return None if self.extremal_class is None else self.extremal_class.value

    def to_dict(self):
        enum_val = lambda e: None if e is None else e.value
        return {
            **self.config.to_dict(),
            "grad_residual": self.grad_residual,
            "eigenvalues": list(self.eigenvalues),
            "index": self.index,
            "degenerate": self.degenerate,
            "action": self.action,
            "residue": self.residue,
            "symmetric": self.symmetric,
            "extremal_class": self.label,
            "cyclically_ordered": self.cyclically_ordered,
            "ordered_wrt_M": self.ordered_wrt_M,
            "region": enum_val(self.region),
        }


def make_record(m: GeneratingModel, c: Configuration, degeneracy_tol=DEGENERACY_TOL):
    g = grad_array(m, c.p, np.array(c.coords))
    w, _ = eigen_sym(hess_array(m, np.array(c.coords)))
    try:
        res = twistmap.residue(m, twistmap.orbit_from_config(m, c))
    except twistmap.NotStationary:
        res = None
    return StationaryRecord(
        config=c,
        grad_residual=float(np.max(np.abs(g))),
        eigenvalues=tuple(float(v) for v in w),
        index=int(np.sum(w < -degeneracy_tol)),
        degenerate=bool(np.any(np.abs(w) <= degeneracy_tol)),
        action=action_eval(m, c),
        residue=res,
        symmetric=twistmap.is_symmetric(c),
    )


def newton_polish(m: GeneratingModel, p: int, x, tol=STATIONARY_TOL, max_iter=100,
                  max_halvings=30):
    """Damped Newton on the gradient. Returns (x, residual, converged)."""
    x = np.array(x, dtype=float)
    g = grad_array(m, p, x)
    r = float(np.max(np.abs(g)))
    for _ in range(max_iter):
        if r < tol:
            return x, r, True
        H = hess_array(m, x)
        if abs(np.linalg.det(H)) < 1e-12:
            step = np.linalg.lstsq(H, -g, rcond=None)[0]
        else:
            step = np.linalg.solve(H, -g)
        norm = np.linalg.norm(g)
        lam = 1.0
        for _ in range(max_halvings):
            trial = x + lam * step
            g_trial = grad_array(m, p, trial)
            if np.linalg.norm(g_trial) < norm:
                break
            lam *= 0.5
        else:
            return x, r, False
        x, g = trial, g_trial
        r = float(np.max(np.abs(g)))
    return x, r, r < tol


def refine(m: GeneratingModel, seed: Configuration, max_iter=100, tol=STATIONARY_TOL,
           degeneracy_tol=DEGENERACY_TOL) -> StationaryRecord:
    """Newton-refine ``seed`` to a stationary state; the result is canonical."""
    x, r, ok = newton_polish(m, seed.p, seed.coords, tol=tol, max_iter=max_iter)
    if not ok:
        raise NoConvergence(f"Newton stalled at residual {r:.3g} from {seed!r}")
    return make_record(m, canonicalize(seed.with_coords(x)), degeneracy_tol)


def seed_lattice(p, q, density, offsets=(-0.25, 0.0, 0.25), max_seeds=4096, rng_seed=0):
    """Seeds x_0 = i/density, x_k = x_0 + k p/q + o_k with o_k from ``offsets``.

    When the full lattice exceeds ``max_seeds`` a fixed pseudo-random subset
    is used.
    """
    base = np.arange(q) * p / q
    combos = list(itertools.product(offsets, repeat=q - 1))
    total = density * len(combos)
    idx = range(total)
    if total > max_seeds:
        idx = sorted(np.random.default_rng(rng_seed).choice(total, max_seeds, replace=False))
    seeds = []
    for n in idx:
        i, k = divmod(int(n), len(combos))
        x = i / density + base
        x[1:] += combos[k]
        seeds.append(x)
    return seeds


def _sort_key(c: Configuration):
    return tuple(np.round(c.coords, 12))


def enumerate_states(m: GeneratingModel, p: int, q: int, density=32,
                     offsets=(-0.25, 0.0, 0.25), max_seeds=4096, workers=1,
                     dedup_tol=DEDUP_TOL, expand=True, max_iter=100):
    """Multistart search for stationary (p,q)-configurations.

    Converged seeds are deduplicated by translation class. With ``expand``
    every class is listed by its q translates with x_0 in [0, 1) (the
    fundamental domain of tau_01), otherwise by its canonical representative.
    Records are sorted by x_0, then lexicographically.
    """
    if math.gcd(abs(p), q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")
    seeds = seed_lattice(p, q, density, offsets, max_seeds)

    def run(x):
        y, _, ok = newton_polish(m, p, x, max_iter=max_iter)
        return y if ok else None

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            found = list(pool.map(run, seeds))
    else:
        found = [run(x) for x in seeds]

    classes = []
    for y in found:
        if y is None:
            continue
        c = Configuration(p, q, y)
        if not any(same_class(c, k, dedup_tol) for k in classes):
            classes.append(canonicalize(c))
    configs = []
    for k in classes:
        configs.extend(unit_rotations(k) if expand else [k])
    return [make_record(m, c) for c in sorted(configs, key=_sort_key)]


@dataclass
class MinimizerContext:
    p: int
    q: int
    minimizers: list = field(default_factory=list)      # canonical class reps
    minimaximizers: list = field(default_factory=list)
    maximizers: list = field(default_factory=list)       # index q

    def translates(self, reps, lo, hi):
        """Translates of ``reps`` with first coordinate in [lo, hi], sorted."""
        out = []
        for r in reps:
            for i in range(self.q):
                base = _extended(r, i, self.q)
                for j in range(math.ceil(lo - base[0]), math.floor(hi - base[0]) + 1):
                    out.append(r.with_coords(base + j))
        out.sort(key=lambda c: c.coords[0])
        return out

    def bracket(self, z: Configuration, tol=DEFAULT_TOL):
        """Consecutive minimizers x < x' with x_0 < z_0 < x'_0.

        Returns (x, x', tie) where ``tie`` is a minimizer translate with
        x_0 == z_0 within tol (then x and x' are its neighbours), else None.
        """
        if not self.minimizers:
            raise NoMinimizerFound("context has no minimizers")
        z0 = z.coords[0]
        w = abs(self.p) + 1.0
        ts = self.translates(self.minimizers, z0 - w, z0 + w)
        below = [t for t in ts if t.coords[0] < z0 - tol]
        above = [t for t in ts if t.coords[0] > z0 + tol]
        ties = [t for t in ts if abs(t.coords[0] - z0) <= tol]
        if not below or not above:
            raise NoMinimizerFound(f"no bracketing minimizers for {z!r}")
        return below[-1], above[0], (ties[0] if ties else None)

    def minimax_between(self, x, xp, tol=DEFAULT_TOL):
        ts = self.translates(self.minimaximizers, x.coords[0], xp.coords[0])
        return [y for y in ts if region_test(y, x, xp, "open_interval", tol)]

    def anchors(self):
        return self.minimizers + self.minimaximizers + self.maximizers


def _in_class(z, reps, tol=DEDUP_TOL):
    return any(same_class(z, r, tol) for r in reps)


def _connects_minimizers(m, y, ctx):
    """True when both unstable branches of y end on minimizers.

    An index-1 state between two minimizers need not be their mountain pass:
    with extra local minima in the gap, one branch can end on one of those.
    """
    from .flow import NonConvergence, NotMinimax, trace_unstable
    try:
        lower, upper = trace_unstable(m, y)
    except (NonConvergence, NotMinimax):
        return False
    return all(_in_class(path.final, ctx.minimizers, 1e-6) for path in (lower, upper))


def classify(records, m: GeneratingModel, tol=DEFAULT_TOL, action_tol=ACTION_TIE_TOL):
    """Assign extremal class and order flags; build the minimizer context."""
    if not records:
        raise NoMinimizerFound("no records")
    p, q = records[0].config.p, records[0].config.q
    mins = [r for r in records if r.index == 0 and not r.degenerate]
    if not mins:
        mins = [r for r in records if r.index == 0]
    if not mins:
        raise NoMinimizerFound("no index-0 record")
    wmin = min(r.action for r in mins)
    ctx = MinimizerContext(p, q)
    for r in mins:
        if r.action <= wmin + action_tol and not _in_class(r.config, ctx.minimizers):
            ctx.minimizers.append(canonicalize(r.config))

    out = []
    for r in records:
        if r.index == 0:
            ec = (ExtremalClass.GLOBAL_MIN if _in_class(r.config, ctx.minimizers)
                  else ExtremalClass.LOCAL_MIN)
        elif r.index == 1:
            ec = ExtremalClass.MINIMAX
        else:
            ec = ExtremalClass.INDEX_K
        ordered = all(comparable_with_all_translates(r.config, x, tol) for x in ctx.minimizers)
        out.append(replace(r, extremal_class=ec, ordered_wrt_M=ordered,
                           cyclically_ordered=is_cyclically_ordered(r.config, tol)))

    for r in out:
        if r.degenerate:
            continue
        if r.index == 1 and r.ordered_wrt_M and not _in_class(r.config, ctx.minimaximizers):
            x, xp, tie = ctx.bracket(r.config, tol)
            if (tie is None and region_test(r.config, x, xp, "open_interval", tol)
                    and _connects_minimizers(m, r.config, ctx)):
                ctx.minimaximizers.append(canonicalize(r.config))
        elif r.index == q and q > 1 and not _in_class(r.config, ctx.maximizers):
            ctx.maximizers.append(canonicalize(r.config))
    return out, ctx


def _boundary_hits(z, ctx, tol):
    hits = []
    for a in ctx.anchors():
        if same_class(z, a, DEDUP_TOL):
            continue
        hits.extend(t for _, _, t in on_cone_boundary_of_translates(z, a, tol))
    return hits


def locate(record: StationaryRecord, ctx: MinimizerContext, tol=DEFAULT_TOL) -> Location:
    if record.degenerate:
        return Location.DEGENERATE_UNCLASSIFIED
    z = record.config
    if _in_class(z, ctx.minimizers):
        return Location.AT_MINIMIZER
    if _in_class(z, ctx.minimaximizers):
        return Location.AT_MINIMAX
    if _boundary_hits(z, ctx, tol):
        return Location.BOUNDARY_VIOLATION
    x, xp, tie = ctx.bracket(z, tol)
    if tie is not None:
        # on the hyperplane X_0 = x_0 of a minimizer but not on its cone boundary
        return Location.UNORDERED_REGION
    for y in ctx.minimax_between(x, xp, tol):
        if (region_test(z, x, y, "closed_interval", tol)
                or region_test(z, y, xp, "closed_interval", tol)):
            return Location.FORBIDDEN_VIOLATION
    if region_test(z, x, xp, "open_interval", tol):
        return Location.ORDERED_GAP
    return Location.UNORDERED_REGION


def locate_all(records, ctx, tol=DEFAULT_TOL):
    return [replace(r, region=locate(r, ctx, tol)) for r in records]


@dataclass
class CheckResult:
    name: str
    description: str
    offenders: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.offenders

    def to_dict(self):
        return {"status": "PASS" if self.passed else "FAIL",
                "description": self.description,
                "offenders": [o.to_dict() for o in self.offenders]}


@dataclass
class AuditReport:
    checks: dict
    n_audited: int
    n_skipped_degenerate: int

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def to_dict(self):
        return {"passed": self.passed, "n_audited": self.n_audited,
                "n_skipped_degenerate": self.n_skipped_degenerate,
                "checks": {k: c.to_dict() for k, c in self.checks.items()}}


def audit_propositions(records, ctx: MinimizerContext, m: GeneratingModel = None,
                       tol=DEFAULT_TOL) -> AuditReport:
    """Check the location theorems against a set of non-degenerate records.

    cone_boundary: no state lies on the boundary of an order cone of a
        minimizer, minimaximizer or maximizer.
    forbidden_interval: no state other than the ends lies in [x, y] or
        [y, x'] for consecutive minimizers x < x' and a minimaximizer y
        between them.
    order_location: states strictly between consecutive minimizers are
        cyclically ordered; states with x_0 < z_0 < x'_0 outside [x, x']
        are incomparable with some minimizer.
    minimizer_line: a non-minimizing state sharing a coordinate (mod 1)
        with a minimizer is incomparable with some minimizer.

    ``m`` is accepted for symmetry with the other entry points; the checks
    use only the configurations.
    """
    checks = {
        "cone_boundary": CheckResult("cone_boundary", "no stationary state on an extremal cone boundary"),
        "forbidden_interval": CheckResult("forbidden_interval", "no stationary state in [x,y] u [y,x']"),
        "order_location": CheckResult("order_location", "ordered inside [[x,x']], unordered outside [x,x']"),
        "minimizer_line": CheckResult("minimizer_line", "states on a minimizer's vertical line are unordered"),
    }
    audited = [r for r in records if not r.degenerate]
    for r in audited:
        z = r.config
        is_min = _in_class(z, ctx.minimizers)
        if _boundary_hits(z, ctx, tol):
            checks["cone_boundary"].offenders.append(r)
        if is_min:
            continue
        if shares_coordinate(z, ctx.minimizers, tol):
            if all(comparable_with_all_translates(z, x, tol) for x in ctx.minimizers):
                checks["minimizer_line"].offenders.append(r)
        x, xp, tie = ctx.bracket(z, tol)
        if tie is not None:
            continue
        if not _in_class(z, ctx.minimaximizers):
            for y in ctx.minimax_between(x, xp, tol):
                if (region_test(z, x, y, "closed_interval", tol)
                        or region_test(z, y, xp, "closed_interval", tol)):
                    checks["forbidden_interval"].offenders.append(r)
                    break
        inside = region_test(z, x, xp, "open_interval", tol)
        outside = not region_test(z, x, xp, "closed_interval", tol)
        # outside: unordered relative to the minimizers; for q = 2 every
        # state with 0 < z_1 - z_0 < 1 is ordered relative to its own translates
        if inside and not is_cyclically_ordered(z, tol):
            checks["order_location"].offenders.append(r)
        elif outside and all(comparable_with_all_translates(z, x, tol) for x in ctx.minimizers):
            checks["order_location"].offenders.append(r)
    return AuditReport(checks, len(audited), len(records) - len(audited))


def analyze(m: GeneratingModel, p: int, q: int, density=32, tol=DEFAULT_TOL, **kw):
    """enumerate -> classify -> locate -> audit in one call."""
    records = enumerate_states(m, p, q, density=density, **kw)
    records, ctx = classify(records, m, tol)
    records = locate_all(records, ctx, tol)
    return records, ctx, audit_propositions(records, ctx, m, tol)


def records_to_json(records, fh, manifest=None):
    doc = {"records": [r.to_dict() for r in records]}
    if manifest is not None:
        doc = {"manifest": manifest, **doc}
    json.dump(doc, fh, indent=2)
    fh.write("\n")
