"""Contact systems on a chart: Reeb and Hamiltonian fields, brackets, checks.

The numerical core solves, at each sample point, the linear system that pins
down the Hamiltonian vector field of a function ``h``:

    pairing     :  eta(X) = h
    contraction :  (X -| d eta)_j = a * eta_j - (dh)_j,    a := dh(R)

with ``R`` the Reeb field (the ``h = 1`` case, whose right-hand side collapses
to ``(1, 0, ..., 0)``).  The ``(dim+1) x dim`` coefficient matrix has full
column rank exactly where the contact condition holds, so a batched SVD solve
recovers the unique solution.  Spatial Jacobians of solved fields come from
differentiating the linear system itself -- ``A dX = db - (dA) X`` -- never
from finite differences; brackets are then computed as ``eta([X_f, X_g])``
from honest field commutators, which makes the identities checked in this
module genuine cross-checks on the solver rather than restatements of its
defining equations.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .charts import Chart, ChartMismatchError, DifferentialForm, VectorField, one_form
from .expressions import ScalarExpr, const, parse

__all__ = [
    "DEFAULT_SAMPLES",
    "DEFAULT_SEED",
    "TOLERANCES",
    "CheckResult",
    "ClassificationRecord",
    "ContactSystem",
    "CoordinateMap",
    "GeometricError",
    "ContactConditionError",
    "SingularSystemError",
    "ConformalFactorError",
    "InverseMismatchError",
    "HamiltonianFieldEvaluator",
    "ScalarEvaluator",
    "IsotropyDefectEvaluator",
    "resolve_tolerance",
    "is_contact_form",
    "reeb_field",
    "hamiltonian_field",
    "jacobi_bracket",
    "is_good",
    "is_first_integral",
    "verify_flow_identity",
    "isotropy_defect",
    "involution_table",
    "independence_rank",
    "classify_system",
    "conformal_bracket_law",
    "conjugacy_transport",
    "reeb_defining_check",
    "hamiltonian_contract_checks",
]

DEFAULT_SEED = 20110615
DEFAULT_SAMPLES = 128

#: Ratio of smallest to largest singular value below which the pointwise
#: field system is declared singular (the contact condition fails there).
SINGULAR_RATIO = 1e-12

#: Sample count used for the construction-time contact check.
VERIFY_SAMPLES = 32

#: Default tolerance per named check.  Callers may override any entry through
#: the ``tolerances`` mapping accepted by every operation; other modules
#: register their own names by updating this table at import time.
TOLERANCES: dict[str, float] = {
    "contact_determinant": 1e-10,
    "reeb_defining": 1e-9,
    "hamiltonian_pairing": 1e-9,
    "hamiltonian_invariance": 1e-8,
    "goodness": 1e-9,
    "first_integral": 1e-9,
    "flow_identity": 1e-8,
    "isotropy_identity": 1e-8,
    "bracket_antisymmetry": 1e-9,
    "involution": 1e-8,
    "conformal_law": 1e-7,
    "rank_svd": 1e-8,
    "dense_fraction": 0.5,
    "inverse_roundtrip": 1e-9,
}


def resolve_tolerance(name: str, overrides: Mapping[str, float] | None = None) -> float:
    """The effective tolerance for ``name``, honouring per-call overrides."""
    if overrides is not None and name in overrides:
        return float(overrides[name])
    try:
        return TOLERANCES[name]
    except KeyError:
        raise KeyError(f"unknown tolerance name {name!r}") from None


class GeometricError(Exception):
    """A geometric precondition failed (as opposed to a usage error)."""


class ContactConditionError(GeometricError):
    """The 1-form fails the contact condition on the sampled chart."""


class SingularSystemError(GeometricError):
    """The pointwise field system is rank-deficient at some point."""

    def __init__(self, point: Sequence[float], detail: str = ""):
        self.point = tuple(float(c) for c in np.atleast_1d(point))
        message = f"singular field system at point {self.point}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class ConformalFactorError(GeometricError):
    """A conformal factor is not strictly positive at a sample."""


class InverseMismatchError(GeometricError):
    """A coordinate map and its declared inverse fail to round-trip."""


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one sampled check.

    ``passed`` is definitionally ``max_residual <= tolerance``; the
    constructor rejects any combination that breaks that equivalence.
    ``witness`` is the sample point attaining ``max_residual``.
    """

    name: str
    passed: bool
    max_residual: float
    samples: int
    tolerance: float
    witness: tuple[float, ...] | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed != bool(self.max_residual <= self.tolerance):
            raise ValueError(
                "CheckResult invariant violated: passed must equal "
                "(max_residual <= tolerance)"
            )

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"{self.name}: {status} "
            f"(max residual {self.max_residual:.3e}, tolerance {self.tolerance:.3e}, "
            f"{self.samples} samples)"
        )

    def to_record(self) -> dict:
        """A plain JSON-friendly dictionary."""
        return {
            "name": self.name,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "witness": None if self.witness is None else list(self.witness),
            "detail": _plain(self.detail),
        }


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _make_result(
    name: str,
    residuals: np.ndarray,
    tolerance: float,
    points: np.ndarray,
    detail: dict | None = None,
) -> CheckResult:
    residuals = np.asarray(residuals, dtype=float)
    idx = int(np.argmax(residuals))
    max_residual = float(residuals[idx])
    return CheckResult(
        name=name,
        passed=bool(max_residual <= tolerance),
        max_residual=max_residual,
        samples=len(points),
        tolerance=float(tolerance),
        witness=tuple(float(c) for c in points[idx]),
        detail=detail or {},
    )


def _as_batch(points, dim: int) -> tuple[np.ndarray, bool]:
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"points must have shape (n, {dim}) or ({dim},), got {pts.shape}")
    return pts, single


# -- the contact system ---------------------------------------------------


@dataclass(frozen=True)
class ContactSystem:
    """A chart carrying a contact form and optional Hamiltonian data.

    ``integrals`` are candidate first integrals of ``hamiltonian`` (used by
    :func:`classify_system`); ``reeb`` may hold a known closed-form Reeb field
    for models where one is available, and is never required -- all operations
    solve for the Reeb field pointwise.

    ``verify`` (init-only, default True) runs the contact-condition check on
    a small construction-time sample and raises :class:`ContactConditionError`
    on failure.  Pass ``verify=False`` to build a deliberately degenerate
    system, e.g. to demonstrate a failing :func:`is_contact_form`.
    """

    chart: Chart
    eta: DifferentialForm
    hamiltonian: ScalarExpr | None = None
    integrals: tuple[ScalarExpr, ...] = ()
    reeb: VectorField | None = None
    name: str = ""
    verify: InitVar[bool] = True

    def __post_init__(self, verify: bool):
        if self.chart.dim % 2 == 0:
            raise ValueError(f"contact chart must be odd-dimensional, got dim {self.chart.dim}")
        if self.eta.degree != 1:
            raise ValueError("eta must be a 1-form")
        if not self.eta.chart.compatible(self.chart):
            raise ChartMismatchError("eta lives on a different chart")
        object.__setattr__(self, "integrals", tuple(self.integrals))
        for expr in (self.hamiltonian, *self.integrals):
            if expr is not None and tuple(expr.coords) != self.chart.coords:
                raise ValueError("scalar data bound to different coordinates than the chart")
        if self.reeb is not None and not self.reeb.chart.compatible(self.chart):
            raise ChartMismatchError("reeb field lives on a different chart")
        if verify:
            check = _contact_check(self, VERIFY_SAMPLES, DEFAULT_SEED, None)
            if not check.passed:
                raise ContactConditionError(
                    f"form on chart {self.chart.name!r} is not contact: "
                    f"determinant ratio {check.detail['min_determinant_ratio']:.3e} "
                    f"at point {check.witness}"
                )

    @property
    def n(self) -> int:
        """Half the kernel dimension: the chart has dimension 2n + 1."""
        return (self.chart.dim - 1) // 2

    def family(self) -> tuple[ScalarExpr, ...]:
        """The Hamiltonian together with its declared integrals."""
        if self.hamiltonian is None:
            raise ValueError("system carries no hamiltonian")
        return (self.hamiltonian, *self.integrals)


# -- batched pointwise kernel ---------------------------------------------


@dataclass
class _Solved:
    """One function's data on a frame: jets, Reeb derivative, field, Jacobian.

    ``X[n, i]`` are field components; ``dX[n, i, k] = d_k X^i``.
    """

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray
    a: np.ndarray
    da: np.ndarray
    X: np.ndarray
    dX: np.ndarray


class _Frame:
    """All batched per-point data for one system at one set of points.

    Index conventions: ``E[n, k] = eta_k``, ``dE[n, i, k] = d_i eta_k``,
    ``D[n, i, j] = dEta(e_i, e_j)``, ``dD[n, k, i, j] = d_k D[i, j]``.
    """

    def __init__(self, system: ContactSystem, points) -> None:
        pts, _ = _as_batch(points, system.chart.dim)
        self.system = system
        self.points = pts
        n, d = pts.shape
        E = np.zeros((n, d))
        dE = np.zeros((n, d, d))
        d2E = np.zeros((n, d, d, d))
        for (k,), expr in system.eta.coefficients.items():
            v, g, h = expr.jets(pts)
            E[:, k] = v
            dE[:, :, k] = g
            d2E[:, :, :, k] = h
        self.E = E
        self.dE = dE
        self.D = dE - np.swapaxes(dE, 1, 2)
        self.dD = d2E - np.swapaxes(d2E, 2, 3)
        self._svd: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self._dA: np.ndarray | None = None
        self._reeb: _Solved | None = None
        self._cache: dict[int, tuple[ScalarExpr, _Solved]] = {}

    # -- linear algebra ---------------------------------------------------

    def _solver(self):
        if self._svd is None:
            A = np.concatenate([self.E[:, None, :], np.swapaxes(self.D, 1, 2)], axis=1)
            U, S, Vt = np.linalg.svd(A, full_matrices=False)
            bad = S[:, -1] <= SINGULAR_RATIO * S[:, 0]
            if np.any(bad):
                i = int(np.argmax(bad))
                raise SingularSystemError(
                    self.points[i],
                    f"singular-value ratio {S[i, -1]:.3e} / {S[i, 0]:.3e} "
                    f"below {SINGULAR_RATIO:g}; the contact condition fails here",
                )
            self._svd = (U, S, Vt)
            # dA[n, k, row, i] = d_k A[row, i]
            self._dA = np.concatenate(
                [self.dE[:, :, None, :], np.swapaxes(self.dD, 2, 3)], axis=2
            )
        return self._svd

    def _pinv_apply(self, B: np.ndarray) -> np.ndarray:
        U, S, Vt = self._solver()
        return np.einsum("nji,nj,nkj,nkm->nim", Vt, 1.0 / S, U, B)

    def _solve_linear(self, h, dh, d2h, a, da):
        n, d = self.points.shape
        b = np.concatenate([h[:, None], a[:, None] * self.E - dh], axis=1)
        X = self._pinv_apply(b[:, :, None])[:, :, 0]
        db = np.empty((n, d + 1, d))
        db[:, 0, :] = dh
        db[:, 1:, :] = (
            da[:, None, :] * self.E[:, :, None]
            + a[:, None, None] * np.swapaxes(self.dE, 1, 2)
            - np.swapaxes(d2h, 1, 2)
        )
        rhs = db - np.einsum("nkri,ni->nrk", self._dA, X)
        dX = self._pinv_apply(rhs)
        return X, dX

    # -- solved fields ----------------------------------------------------

    def reeb(self) -> _Solved:
        if self._reeb is None:
            n, d = self.points.shape
            one = np.ones(n)
            zero1 = np.zeros((n, d))
            zero2 = np.zeros((n, d, d))
            X, dX = self._solve_linear(one, zero1, zero2, np.zeros(n), zero1)
            self._reeb = _Solved(one, zero1, zero2, np.zeros(n), zero1, X, dX)
        return self._reeb

    def solved(self, expr: ScalarExpr) -> _Solved:
        hit = self._cache.get(id(expr))
        if hit is not None:
            return hit[1]
        R = self.reeb()
        h, dh, d2h = expr.jets(self.points)
        a = np.einsum("ni,ni->n", R.X, dh)
        da = np.einsum("nik,ni->nk", R.dX, dh) + np.einsum("ni,nki->nk", R.X, d2h)
        X, dX = self._solve_linear(h, dh, d2h, a, da)
        sol = _Solved(h, dh, d2h, a, da, X, dX)
        self._cache[id(expr)] = (expr, sol)
        return sol

    # -- derived pointwise quantities -------------------------------------

    def eta_values(self, X: np.ndarray) -> np.ndarray:
        return np.einsum("ni,ni->n", self.E, X)

    def contraction(self, X: np.ndarray) -> np.ndarray:
        """Covector of ``X -| dEta``, shape (n, dim)."""
        return np.einsum("ni,nij->nj", X, self.D)

    def commutator(self, s1: _Solved, s2: _Solved) -> np.ndarray:
        return np.einsum("nj,nij->ni", s1.X, s2.dX) - np.einsum(
            "nj,nij->ni", s2.X, s1.dX
        )

    def bracket(self, s1: _Solved, s2: _Solved) -> np.ndarray:
        """Jacobi bracket values ``eta([X_1, X_2])``."""
        return self.eta_values(self.commutator(s1, s2))

    def directional(self, s_field: _Solved, s_fn: _Solved) -> np.ndarray:
        """Values of the derivative of ``s_fn`` along ``s_field``."""
        return np.einsum("ni,ni->n", s_field.X, s_fn.grad)

    def two_form_pairing(self, s1: _Solved, s2: _Solved) -> np.ndarray:
        """Values of ``dEta(X_1, X_2)``."""
        return np.einsum("ni,nij,nj->n", s1.X, self.D, s2.X)

    def lie_eta(self, s: _Solved) -> np.ndarray:
        """Coefficients of the Lie derivative of eta along ``s.X``, (n, dim)."""
        return np.einsum("ni,nij->nj", s.X, self.dE) + np.einsum(
            "ni,nij->nj", self.E, s.dX
        )

    def contact_determinant(self) -> tuple[np.ndarray, np.ndarray]:
        """Determinant of ``D + E E^T`` and its Hadamard row-norm scale.

        The rank-one update fills the one-dimensional kernel of ``D`` with
        the eta direction, so the determinant is nonzero exactly where the
        contact condition holds; dividing by the product of row norms makes
        the threshold resolution-independent.
        """
        M = self.D + np.einsum("ni,nj->nij", self.E, self.E)
        det = np.linalg.det(M)
        scale = np.prod(np.linalg.norm(M, axis=2), axis=1)
        return det, scale


# -- evaluators -----------------------------------------------------------


class HamiltonianFieldEvaluator:
    """Solver-backed vector field for one Hamiltonian function.

    Evaluates anywhere on the chart; the Reeb field is the ``hamiltonian = 1``
    case.  The most recent frame is kept so that ``evaluate``, ``jacobian``
    and ``residuals`` at the same points share one solve.
    """

    def __init__(self, system: ContactSystem, hamiltonian: ScalarExpr):
        if tuple(hamiltonian.coords) != system.chart.coords:
            raise ValueError("hamiltonian bound to different coordinates than the chart")
        self.system = system
        self.hamiltonian = hamiltonian
        self._last: tuple[bytes, _Frame] | None = None

    def _frame(self, pts: np.ndarray) -> _Frame:
        key = pts.tobytes()
        if self._last is None or self._last[0] != key:
            self._last = (key, _Frame(self.system, pts))
        return self._last[1]

    def evaluate(self, points) -> np.ndarray:
        pts, single = _as_batch(points, self.system.chart.dim)
        X = self._frame(pts).solved(self.hamiltonian).X
        return X[0] if single else X

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)

    def jacobian(self, points) -> np.ndarray:
        """``J[n, i, k] = d_k X^i`` (or ``(dim, dim)`` for a single point)."""
        pts, single = _as_batch(points, self.system.chart.dim)
        dX = self._frame(pts).solved(self.hamiltonian).dX
        return dX[0] if single else dX

    def reeb_derivative(self, points) -> np.ndarray | float:
        """Values of the Reeb derivative of the Hamiltonian."""
        pts, single = _as_batch(points, self.system.chart.dim)
        a = self._frame(pts).solved(self.hamiltonian).a
        return float(a[0]) if single else a

    def residual_arrays(self, points) -> dict[str, np.ndarray]:
        """Per-sample defining-equation residuals.

        ``pairing``:     |eta(X) - h|
        ``contraction``: max_j |(X -| dEta)_j - (a eta - dh)_j|
        ``invariance``:  max_j |(Lie_X eta)_j - a eta_j|
        """
        pts, _ = _as_batch(points, self.system.chart.dim)
        fr = self._frame(pts)
        s = fr.solved(self.hamiltonian)
        pairing = np.abs(fr.eta_values(s.X) - s.value)
        target = s.a[:, None] * fr.E - s.grad
        contraction = np.max(np.abs(fr.contraction(s.X) - target), axis=1)
        invariance = np.max(np.abs(fr.lie_eta(s) - s.a[:, None] * fr.E), axis=1)
        return {"pairing": pairing, "contraction": contraction, "invariance": invariance}

    def residuals(self, points) -> dict[str, float]:
        """Worst-case defining-equation residuals over ``points``."""
        return {k: float(v.max()) for k, v in self.residual_arrays(points).items()}


class ScalarEvaluator:
    """A pointwise scalar derived from solved Hamiltonian fields."""

    def __init__(self, system: ContactSystem, compute: Callable[[_Frame], np.ndarray]):
        self.system = system
        self._compute = compute

    def evaluate(self, points) -> np.ndarray | float:
        pts, single = _as_batch(points, self.system.chart.dim)
        values = self._compute(_Frame(self.system, pts))
        return float(values[0]) if single else values

    def __call__(self, points) -> np.ndarray | float:
        return self.evaluate(points)

    def at(self, point) -> float:
        value = self.evaluate(np.asarray(point, dtype=float).reshape(-1))
        return float(value)


class IsotropyDefectEvaluator(ScalarEvaluator):
    """Pointwise ``dEta(X_h, X_f)``, cross-checked against the expansion
    ``X_h f - X_f h - {h, f}`` at every evaluation.

    The running worst cross-check residual is exposed as ``cross_check``.
    """

    def __init__(
        self,
        system: ContactSystem,
        h: ScalarExpr,
        f: ScalarExpr,
        tolerances: Mapping[str, float] | None = None,
    ):
        self.h = h
        self.f = f
        self._tolerance = resolve_tolerance("isotropy_identity", tolerances)
        self._max_cross = 0.0
        self._seen = 0
        self._witness: tuple[float, ...] | None = None
        super().__init__(system, self._defect)

    def _defect(self, fr: _Frame) -> np.ndarray:
        sh = fr.solved(self.h)
        sf = fr.solved(self.f)
        defect = fr.two_form_pairing(sh, sf)
        expansion = (
            fr.directional(sh, sf) - fr.directional(sf, sh) - fr.bracket(sh, sf)
        )
        cross = np.abs(defect - expansion)
        i = int(np.argmax(cross))
        if cross[i] >= self._max_cross:
            self._max_cross = float(cross[i])
            self._witness = tuple(float(c) for c in fr.points[i])
        self._seen += len(fr.points)
        return defect

    @property
    def cross_check(self) -> CheckResult:
        return CheckResult(
            name="isotropy_identity",
            passed=bool(self._max_cross <= self._tolerance),
            max_residual=self._max_cross,
            samples=self._seen,
            tolerance=self._tolerance,
            witness=self._witness,
        )


# -- operations -----------------------------------------------------------


def _contact_check(
    system: ContactSystem,
    samples: int,
    seed: int,
    tolerances: Mapping[str, float] | None,
) -> CheckResult:
    pts = system.chart.sample(samples, seed)
    det, scale = _Frame(system, pts).contact_determinant()
    threshold = resolve_tolerance("contact_determinant", tolerances)
    ratio = np.abs(det) / np.maximum(scale, 1e-300)
    residuals = np.maximum(0.0, threshold - ratio)
    detail = {
        "min_abs_determinant": float(np.min(np.abs(det))),
        "min_determinant_ratio": float(np.min(ratio)),
        "determinant_ratio_threshold": float(threshold),
    }
    return _make_result("contact_condition", residuals, 0.0, pts, detail)


def is_contact_form(
    system: ContactSystem,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> CheckResult:
    """Sampled contact-condition check: the scaled volume determinant stays
    bounded away from zero at every sample."""
    return _contact_check(system, samples, seed, tolerances)


def reeb_field(system: ContactSystem) -> HamiltonianFieldEvaluator:
    """The unique field with ``eta(R) = 1`` and ``R -| dEta = 0``."""
    return HamiltonianFieldEvaluator(system, const(1.0, system.chart.coords))


def hamiltonian_field(system: ContactSystem, h: ScalarExpr) -> HamiltonianFieldEvaluator:
    """The unique field with ``eta(X) = h`` and ``Lie_X eta = (R h) eta``."""
    return HamiltonianFieldEvaluator(system, h)


def jacobi_bracket(system: ContactSystem, f: ScalarExpr, g: ScalarExpr) -> ScalarEvaluator:
    """Pointwise values of ``eta([X_f, X_g])``; antisymmetric in (f, g)."""
    return ScalarEvaluator(system, lambda fr: fr.bracket(fr.solved(f), fr.solved(g)))


def is_good(
    system: ContactSystem,
    h: ScalarExpr,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> CheckResult:
    """Whether the Reeb derivative of ``h`` vanishes at all samples."""
    pts = system.chart.sample(samples, seed)
    s = _Frame(system, pts).solved(h)
    tol = resolve_tolerance("goodness", tolerances)
    return _make_result("goodness", np.abs(s.a), tol, pts, {"function": str(h)})


def is_first_integral(
    system: ContactSystem,
    h: ScalarExpr,
    f: ScalarExpr,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> CheckResult:
    """Whether ``f`` is constant along the field of ``h`` at all samples."""
    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    sh = fr.solved(h)
    _, f_grad, _ = f.jets(pts)
    residuals = np.abs(np.einsum("ni,ni->n", sh.X, f_grad))
    tol = resolve_tolerance("first_integral", tolerances)
    detail = {"hamiltonian": str(h), "integral": str(f)}
    return _make_result("first_integral", residuals, tol, pts, detail)


def verify_flow_identity(
    system: ContactSystem,
    h: ScalarExpr,
    f: ScalarExpr,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> CheckResult:
    """Residual of ``X_h f = (R h) f + {h, f}`` at all samples."""
    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    sh = fr.solved(h)
    sf = fr.solved(f)
    residuals = np.abs(fr.directional(sh, sf) - sh.a * sf.value - fr.bracket(sh, sf))
    tol = resolve_tolerance("flow_identity", tolerances)
    detail = {"hamiltonian": str(h), "function": str(f)}
    return _make_result("flow_identity", residuals, tol, pts, detail)


def isotropy_defect(
    system: ContactSystem,
    h: ScalarExpr,
    f: ScalarExpr,
    tolerances: Mapping[str, float] | None = None,
) -> IsotropyDefectEvaluator:
    """Pointwise ``dEta(X_h, X_f)`` with a built-in identity cross-check."""
    return IsotropyDefectEvaluator(system, h, f, tolerances)


def involution_table(
    system: ContactSystem,
    fns: Sequence[ScalarExpr],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> list[list[CheckResult]]:
    """Pairwise bracket-vanishing table; entry (i, j) checks ``{f_i, f_j}``."""
    fns = tuple(fns)
    if len(fns) < 2:
        raise ValueError("involution table needs at least two functions")
    tol = resolve_tolerance("involution", tolerances)
    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    sols = [fr.solved(f) for f in fns]
    table: list[list[CheckResult]] = []
    for i, si in enumerate(sols):
        row = []
        for j, sj in enumerate(sols):
            residuals = np.abs(fr.bracket(si, sj))
            detail = {"pair": [str(fns[i]), str(fns[j])]}
            row.append(_make_result(f"involution[{i},{j}]", residuals, tol, pts, detail))
        table.append(row)
    return table


def independence_rank(
    system: ContactSystem,
    fns: Sequence[ScalarExpr],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> tuple[int, float]:
    """Max pointwise rank of the span of the Hamiltonian fields of ``fns``
    and the fraction of samples attaining it."""
    fns = tuple(fns)
    if not fns:
        raise ValueError("independence rank needs at least one function")
    rel = resolve_tolerance("rank_svd", tolerances)
    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    columns = np.stack([fr.solved(f).X for f in fns], axis=2)
    svals = np.linalg.svd(columns, compute_uv=False)
    ranks = np.sum(svals > rel * svals[:, :1], axis=1)
    max_rank = int(ranks.max())
    return max_rank, float(np.mean(ranks == max_rank))


@dataclass(frozen=True)
class ClassificationRecord:
    """Verdicts of :func:`classify_system`; ``detail`` carries the evidence."""

    completely_integrable_witnessed: bool
    good: bool
    completely_good: bool
    reeb_type: bool
    detail: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "completely_integrable_witnessed": self.completely_integrable_witnessed,
            "good": self.good,
            "completely_good": self.completely_good,
            "reeb_type": self.reeb_type,
            "detail": _plain(self.detail),
        }


def classify_system(
    system: ContactSystem,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> ClassificationRecord:
    """Integrability/goodness verdicts for a system carrying ``n`` integrals.

    The family checked is the Hamiltonian together with its integrals
    (``n + 1`` functions).  ``completely_good`` is additionally cross-checked
    through the equivalent criterion that each family field preserves eta
    (vanishing Lie derivative); the agreement flag is recorded in ``detail``.
    """
    family = system.family()
    n = system.n
    if len(system.integrals) != n:
        raise ValueError(
            f"dimension-{system.chart.dim} chart needs exactly {n} integrals, "
            f"got {len(system.integrals)}"
        )
    tol_fi = resolve_tolerance("first_integral", tolerances)
    tol_good = resolve_tolerance("goodness", tolerances)
    tol_inv = resolve_tolerance("involution", tolerances)
    tol_lie = resolve_tolerance("hamiltonian_invariance", tolerances)
    rel = resolve_tolerance("rank_svd", tolerances)
    dense = resolve_tolerance("dense_fraction", tolerances)

    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    sols = [fr.solved(f) for f in family]
    sh = sols[0]

    first_integral_residual = max(
        float(np.max(np.abs(fr.directional(sh, s)))) for s in sols
    )
    involution_residual = 0.0
    for i, si in enumerate(sols):
        for sj in sols[i + 1 :]:
            involution_residual = max(
                involution_residual, float(np.max(np.abs(fr.bracket(si, sj))))
            )
    columns = np.stack([s.X for s in sols], axis=2)
    svals = np.linalg.svd(columns, compute_uv=False)
    ranks = np.sum(svals > rel * svals[:, :1], axis=1)
    max_rank = int(ranks.max())
    rank_fraction = float(np.mean(ranks == max_rank))

    goodness_residuals = [float(np.max(np.abs(s.a))) for s in sols]
    lie_residuals = [float(np.max(np.abs(fr.lie_eta(s)))) for s in sols]

    integrable = (
        first_integral_residual <= tol_fi
        and involution_residual <= tol_inv
        and max_rank == n + 1
        and rank_fraction >= dense
    )
    good = goodness_residuals[0] <= tol_good
    all_good = all(r <= tol_good for r in goodness_residuals)
    completely_good = integrable and all_good
    lie_all_good = all(r <= tol_lie for r in lie_residuals)
    one_index = next(
        (i for i, f in enumerate(family) if f.constant_value() == 1.0), None
    )
    reeb_type = integrable and one_index is not None

    detail = {
        "rank": max_rank,
        "required_rank": n + 1,
        "rank_fraction": rank_fraction,
        "first_integral_max_residual": first_integral_residual,
        "involution_max_residual": involution_residual,
        "goodness_residuals": goodness_residuals,
        "lie_invariance_residuals": lie_residuals,
        "completely_good_cross_check_agrees": lie_all_good == all_good,
        "constant_one_index": one_index,
        "samples": len(pts),
    }
    return ClassificationRecord(integrable, good, completely_good, reeb_type, detail)


def conformal_bracket_law(
    system: ContactSystem,
    conformal_factor: ScalarExpr,
    g: ScalarExpr,
    h: ScalarExpr,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> CheckResult:
    """Bracket transformation under a positive rescale of the contact form:
    the bracket in the rescaled system equals ``f * {g/f, h/f}``."""
    pts = system.chart.sample(samples, seed)
    factor_values = conformal_factor.values(pts)
    if np.any(factor_values <= 0.0):
        i = int(np.argmin(factor_values))
        raise ConformalFactorError(
            f"conformal factor {conformal_factor} is not positive at "
            f"{tuple(float(c) for c in pts[i])}: value {factor_values[i]:.6g}"
        )
    # A strictly positive rescale cannot destroy the contact condition, so the
    # rescaled system skips the construction-time sampling check.
    rescaled = ContactSystem(
        system.chart, system.eta.scaled(conformal_factor), verify=False
    )
    fr_rescaled = _Frame(rescaled, pts)
    lhs = fr_rescaled.bracket(fr_rescaled.solved(g), fr_rescaled.solved(h))
    fr = _Frame(system, pts)
    g_over = g / conformal_factor
    h_over = h / conformal_factor
    rhs = factor_values * fr.bracket(fr.solved(g_over), fr.solved(h_over))
    tol = resolve_tolerance("conformal_law", tolerances)
    detail = {"factor": str(conformal_factor), "g": str(g), "h": str(h)}
    return _make_result("conformal_bracket_law", np.abs(lhs - rhs), tol, pts, detail)


# -- conjugacy ------------------------------------------------------------


@dataclass(frozen=True)
class CoordinateMap:
    """A diffeomorphism of a chart onto itself, with an explicit inverse.

    Both directions are given componentwise as expressions over the chart's
    coordinates; :func:`conjugacy_transport` verifies at samples that they
    actually invert each other.
    """

    chart: Chart
    components: tuple[ScalarExpr, ...]
    inverse_components: tuple[ScalarExpr, ...]

    def __post_init__(self):
        for comps in (self.components, self.inverse_components):
            if len(comps) != self.chart.dim:
                raise ValueError("component count must equal chart dimension")
            for e in comps:
                if tuple(e.coords) != self.chart.coords:
                    raise ValueError("component bound to different coordinates than the chart")

    @staticmethod
    def identity(chart: Chart) -> "CoordinateMap":
        comps = tuple(parse(name, chart.coords) for name in chart.coords)
        return CoordinateMap(chart, comps, comps)

    def _evaluate(self, comps, points) -> np.ndarray:
        pts, single = _as_batch(points, self.chart.dim)
        out = np.stack([c.values(pts) for c in comps], axis=1)
        return out[0] if single else out

    def apply(self, points) -> np.ndarray:
        return self._evaluate(self.components, points)

    def apply_inverse(self, points) -> np.ndarray:
        return self._evaluate(self.inverse_components, points)

    def inverse_mapping(self) -> dict[str, ScalarExpr]:
        """Coordinate-name table of the inverse, for substitution."""
        return {
            name: comp
            for name, comp in zip(self.chart.coords, self.inverse_components)
        }


def conjugacy_transport(
    system: ContactSystem,
    diffeo: CoordinateMap,
    h: ScalarExpr,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> tuple[ContactSystem, CheckResult]:
    """Transport (eta, h) along a diffeomorphism and compare goodness.

    The transported form is the pullback of eta under the inverse map and the
    transported Hamiltonian is ``h`` composed with the inverse map, so the
    returned system represents the same geometry in moved coordinates.  Its
    chart samples by pushing the base chart's samples forward, which keeps
    the goodness comparison on corresponding point sets.
    """
    chart = system.chart
    if not diffeo.chart.compatible(chart):
        raise ChartMismatchError("diffeomorphism lives on a different chart")
    tol_inv = resolve_tolerance("inverse_roundtrip", tolerances)
    pts = chart.sample(samples, seed)
    image = diffeo.apply(pts)
    back = diffeo.apply_inverse(image)
    round_trip = np.max(np.abs(back - pts), axis=1)
    forward_again = diffeo.apply(back)
    round_trip = np.maximum(
        round_trip, np.max(np.abs(forward_again - image), axis=1)
    )
    worst = int(np.argmax(round_trip))
    if round_trip[worst] > tol_inv:
        raise InverseMismatchError(
            f"declared inverse fails to round-trip at "
            f"{tuple(float(c) for c in pts[worst])}: residual {round_trip[worst]:.3e}"
        )

    subs = diffeo.inverse_mapping()
    psi = diffeo.inverse_components
    pulled_coeffs: dict[str, ScalarExpr] = {}
    for (k,), coeff in system.eta.coefficients.items():
        pulled = coeff.substitute(subs, chart.coords)
        for j, name in enumerate(chart.coords):
            term = pulled * psi[k].derivative(name)
            if name in pulled_coeffs:
                pulled_coeffs[name] = pulled_coeffs[name] + term
            else:
                pulled_coeffs[name] = term

    def _pushforward_sampler(count: int, sample_seed: int) -> np.ndarray:
        return diffeo.apply(chart.sample(count, sample_seed))

    moved_chart = replace(
        chart,
        name=f"{chart.name}:transported",
        sampler=_pushforward_sampler,
        domain=None if chart.domain is None else chart.domain.substitute(subs, chart.coords),
    )
    moved_h = h.substitute(subs, chart.coords)
    moved_system = ContactSystem(
        chart=moved_chart,
        eta=one_form(moved_chart, pulled_coeffs),
        hamiltonian=moved_h,
        integrals=tuple(f.substitute(subs, chart.coords) for f in system.integrals),
        name=f"{system.name}:transported" if system.name else "transported",
    )

    base = is_good(system, h, samples, seed, tolerances)
    moved = is_good(moved_system, moved_h, samples, seed, tolerances)
    agree = base.passed == moved.passed
    residual = 0.0 if agree else abs(base.max_residual - moved.max_residual)
    check = CheckResult(
        name="conjugacy_goodness_agreement",
        passed=agree,
        max_residual=residual,
        samples=samples,
        tolerance=0.0,
        witness=moved.witness,
        detail={
            "base_passed": base.passed,
            "base_max_residual": base.max_residual,
            "transported_passed": moved.passed,
            "transported_max_residual": moved.max_residual,
            "inverse_roundtrip_max_residual": float(round_trip[worst]),
        },
    )
    return moved_system, check


# -- contract batteries ----------------------------------------------------


def reeb_defining_check(
    system: ContactSystem,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> CheckResult:
    """Worst residual of the two Reeb defining equations at samples."""
    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    R = fr.reeb()
    pairing = np.abs(fr.eta_values(R.X) - 1.0)
    contraction = np.max(np.abs(fr.contraction(R.X)), axis=1)
    residuals = np.maximum(pairing, contraction)
    tol = resolve_tolerance("reeb_defining", tolerances)
    return _make_result("reeb_defining", residuals, tol, pts)


def hamiltonian_contract_checks(
    system: ContactSystem,
    h: ScalarExpr,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Mapping[str, float] | None = None,
) -> tuple[CheckResult, CheckResult]:
    """Pairing and eta-invariance residuals of the field of ``h``."""
    pts = system.chart.sample(samples, seed)
    fr = _Frame(system, pts)
    s = fr.solved(h)
    pairing = np.abs(fr.eta_values(s.X) - s.value)
    invariance = np.max(np.abs(fr.lie_eta(s) - s.a[:, None] * fr.E), axis=1)
    detail = {"hamiltonian": str(h)}
    return (
        _make_result(
            "hamiltonian_pairing",
            pairing,
            resolve_tolerance("hamiltonian_pairing", tolerances),
            pts,
            detail,
        ),
        _make_result(
            "hamiltonian_invariance",
            invariance,
            resolve_tolerance("hamiltonian_invariance", tolerances),
            pts,
            detail,
        ),
    )
