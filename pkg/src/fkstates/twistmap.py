"""The twist map F(x, y) = (x + y + U'(x), y + U'(x)) generated by h.

Orbits, residues, symmetry lines of the reversible map and the
symmetry-breaking scan over a one-parameter family of models.
"""
import csv
import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .configspace import Configuration, reverse, same_class, shares_coordinate
from .model import GeneratingModel

log = logging.getLogger(__name__)


class NotStationary(ValueError):
    pass


def apply(m: GeneratingModel, x, y):
    """One step of the map; broadcasts over arrays."""
    u = m.U(x, 1)
    return x + y + u, y + u


def iterate(m: GeneratingModel, x, y, n: int):
    for _ in range(n):
        x, y = apply(m, x, y)
    return x, y


def jacobian(m: GeneratingModel, x) -> np.ndarray:
    u2 = m.U(x, 2)
    return np.array([[1.0 + u2, 1.0], [u2, 1.0]])


@dataclass(frozen=True, eq=False)
class Orbit:
    p: int
    q: int
    points: np.ndarray  # shape (q, 2): rows (x_k, y_k)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def closure_error(self, m: GeneratingModel) -> float:
        """Max deviation from the map relations, including F^q = (x0 + p, y0)."""
        nxt = np.vstack([self.points[1:], self.points[:1] + [self.p, 0.0]])
        fx, fy = apply(m, self.x, self.y)
        return float(max(np.max(np.abs(fx - nxt[:, 0])), np.max(np.abs(fy - nxt[:, 1]))))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "x", "y"])
            for k, (x, y) in enumerate(self.points):
                w.writerow([k, f"{x:.17g}", f"{y:.17g}"])


def orbit_from_config(m: GeneratingModel, c: Configuration, tol=1e-9) -> Orbit:
    """Points (x_k, -h1(x_k, x_{k+1})), k < q, of a stationary configuration."""
    x = np.array(c.coords)
    nxt = np.roll(x, -1)
    nxt[-1] += c.p
    y = nxt - x - m.U(x, 1)
    orbit = Orbit(c.p, c.q, np.column_stack([x, y]))
    err = orbit.closure_error(m)
    if err > tol:
        raise NotStationary(f"configuration is not stationary (closure error {err:.3g})")
    return orbit


def config_from_orbit(orbit: Orbit) -> Configuration:
    return Configuration(orbit.p, orbit.q, orbit.x)


def is_pq_periodic(m: GeneratingModel, x, y, p, q, tol=1e-10) -> bool:
    if q < 1:
        raise ValueError("q must be positive")
    xq, yq = iterate(m, float(x), float(y), q)
    return abs(xq - x - p) <= tol and abs(yq - y) <= tol


def monodromy(m: GeneratingModel, orbit: Orbit) -> np.ndarray:
    M = np.eye(2)
    for xk in orbit.x:
        M = jacobian(m, xk) @ M
    return M


def residue(m: GeneratingModel, orbit: Orbit) -> float:
    """(2 - trace M) / 4 for the period-q linearization M."""
    return float((2.0 - np.trace(monodromy(m, orbit))) / 4.0)


def is_symmetric(c: Configuration, tol=1e-8) -> bool:
    """Whether the time-reversed configuration is a translate of ``c``."""
    return same_class(reverse(c), c, tol)


class SymmetryLine(enum.Enum):
    G0 = "G0"        # x = 0
    G0P = "G0'"      # x = 1/2
    G1 = "G1"        # x = y/2 mod 1
    G1P = "G1'"      # x = (y - 1)/2 mod 1

    def x_on_line(self, y):
        if self is SymmetryLine.G0:
            return np.zeros_like(np.asarray(y, dtype=float))
        if self is SymmetryLine.G0P:
            return np.full_like(np.asarray(y, dtype=float), 0.5)
        if self is SymmetryLine.G1:
            return np.mod(np.asarray(y, dtype=float) / 2.0, 1.0)
        return np.mod((np.asarray(y, dtype=float) - 1.0) / 2.0, 1.0)

    def contains(self, x, y, tol=1e-9):
        d = np.asarray(x) - self.x_on_line(y)
        return bool(np.all(np.abs(d - np.round(d)) <= tol))


def _line_residual(m, line, p, q, y):
    x0 = line.x_on_line(y)
    xq, _ = iterate(m, x0, y, q)
    return xq - x0 - p


def find_symmetric_orbit(m: GeneratingModel, p: int, q: int, line=SymmetryLine.G0,
                         y_range=None, tol=1e-13, closure_tol=1e-9, grid=2000):
    """Periodic orbits starting on ``line``.

    Brackets sign changes of the x-closure residual of F^q over a grid in y,
    refines each with Brent's method and keeps the roots whose full closure
    (x and y) is within ``closure_tol``. Returns a list of orbits sorted by y0.
    """
    line = SymmetryLine(line)
    if y_range is None:
        y_range = (p / q - 2.0, p / q + 2.0)
    ys = np.linspace(y_range[0], y_range[1], grid + 1)
    r = _line_residual(m, line, p, q, ys)
    f = lambda y: float(_line_residual(m, line, p, q, y))
    roots = [ys[k] for k in np.flatnonzero(r == 0.0)]
    for k in np.flatnonzero(r[:-1] * r[1:] < 0):
        roots.append(brentq(f, ys[k], ys[k + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    orbits = []
    for y0 in sorted(roots):
        x0 = float(line.x_on_line(y0))
        pts = [(x0, y0)]
        for _ in range(q - 1):
            pts.append(apply(m, *pts[-1]))
        orbit = Orbit(p, q, np.array(pts, dtype=float))
        if orbit.closure_error(m) <= closure_tol:
            if not any(abs(o.points[0, 1] - y0) <= 1e-9 for o in orbits):
                orbits.append(orbit)
    return orbits


def shares_minimizer_line(z, ctx, tol=1e-9) -> bool:
    """Whether the orbit of ``z`` meets a vertical line x = x_j of a minimizer.

    ``z`` is a StationaryRecord or a Configuration; ``ctx`` a MinimizerContext.
    """
    c = getattr(z, "config", z)
    return shares_coordinate(c, ctx.minimizers, tol)


@dataclass
class ScanRecord:
    eps: float
    family: str
    y0: float
    x0: float
    residue: float
    index: int
    symmetric: bool

    CSV_COLUMNS = ("eps", "family", "y0", "x0", "residue", "index", "symmetric")

    def row(self):
        return [f"{self.eps:.17g}", self.family, f"{self.y0:.17g}", f"{self.x0:.17g}",
                f"{self.residue:.17g}", str(self.index), "1" if self.symmetric else "0"]


@dataclass
class ThresholdEvent:
    kind: str          # "asymmetric_birth" or "asymmetric_death"
    eps_below: float   # last grid value before the change
    eps_above: float   # first grid value after it

    def to_dict(self):
        return {"kind": self.kind, "eps_below": self.eps_below, "eps_above": self.eps_above}


@dataclass
class ScanResult:
    records: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)
    failures: list = field(default_factory=list)   # (eps, message)

    def asymmetric_counts(self):
        counts = {}
        for r in self.records:
            counts.setdefault(r.eps, 0)
            if not r.symmetric:
                counts[r.eps] += 1
        return counts

    def to_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ScanRecord.CSV_COLUMNS)
            for r in self.records:
                w.writerow(r.row())


def rimmer_scan(family, p: int, q: int, eps_grid, density=16, lines=tuple(SymmetryLine),
                y_range=None, match_dist=0.05):
    """Track symmetric and asymmetric (p,q) stationary states along ``eps_grid``.

    ``family`` maps eps to a GeneratingModel. At every eps the symmetry lines
    are searched for periodic orbits and the configuration space is
    multistarted for off-line states; each distinct translation class yields
    one ScanRecord. Symmetric families keep their id across eps by matching
    the nearest root on the same line of the previous grid value.
    Births and deaths of asymmetric states are reported as threshold events.
    Degenerate states (e.g. the continuum at eps = 0) are left out.
    """
    from .stationary import NoConvergence, enumerate_states, refine

    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(np.diff(eps_grid) <= 0):
        raise ValueError("eps_grid must be strictly ascending")
    result = ScanResult()
    prev_roots = {}   # (line, family id) -> y0
    n_fam = {}
    prev_asym = None
    for eps in eps_grid:
        m = family(float(eps))
        recs = []
        classes = []
        roots_now = {}
        try:
            for line in lines:
                for orbit in find_symmetric_orbit(m, p, q, line, y_range=y_range):
                    y0 = float(orbit.points[0, 1])
                    cands = [(abs(y0 - yp), fid) for (ln, fid), yp in prev_roots.items()
                             if ln is line and abs(y0 - yp) <= match_dist
                             and (ln, fid) not in roots_now]
                    if cands:
                        fid = min(cands)[1]
                    else:
                        n_fam[line] = n_fam.get(line, 0) + 1
                        fid = f"{line.value}#{n_fam[line]}"
                    roots_now[(line, fid)] = y0
                    try:
                        rec = refine(m, config_from_orbit(orbit))
                    except NoConvergence:
                        continue
                    if any(same_class(rec.config, c) for c in classes):
                        continue
                    classes.append(rec.config)
                    recs.append(ScanRecord(float(eps), fid, y0, float(orbit.points[0, 0]),
                                           residue(m, orbit), rec.index, True))
            asym = []
            for rec in enumerate_states(m, p, q, density=density, expand=False):
                if rec.degenerate or any(same_class(rec.config, c) for c in classes):
                    continue
                classes.append(rec.config)
                orbit = orbit_from_config(m, rec.config)
                sym = is_symmetric(rec.config)
                if not sym:
                    asym.append(rec)
                recs.append(ScanRecord(float(eps), "sym" if sym else f"asym#{len(asym)}",
                                       float(orbit.points[0, 1]), float(orbit.points[0, 0]),
                                       residue(m, orbit), rec.index, sym))
        except Exception as exc:  # recorded per grid point, not fatal
            log.warning("scan failed at eps=%g: %s", eps, exc)
            result.failures.append((float(eps), str(exc)))
            continue
        prev_roots = roots_now
        result.records.extend(recs)
        has_asym = bool(asym)
        if prev_asym is not None and has_asym != prev_asym:
            kind = "asymmetric_birth" if has_asym else "asymmetric_death"
            result.thresholds.append(ThresholdEvent(kind, prev_eps, float(eps)))
        prev_asym, prev_eps = has_asym, float(eps)
    return result
