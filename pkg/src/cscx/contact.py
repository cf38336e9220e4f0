"""The standard contact chart model and its structure maps.

A contact chart is built from a cs potential beta (a one-form on the base
with nondegenerate differential) by adjoining a transversal coordinate t:
the contact form is alpha = (dt + beta), rescaled so that it pairs to one
with the chosen transversal field xi = xi_scale * d/dt.  The corank-one
distribution H = ker(alpha) is framed by X_v = d/dv - beta(d/dv) d/dt over
the base coordinates, and the line Q = TM/H is trivialized by xi (dually,
its annihilator by alpha) throughout.

Nondegeneracy checks follow a sampling policy: the relevant top coefficient
is evaluated at the origin and five fixed pseudo-random rational points
(poly ring) or on its constant Fourier mode (trig ring); the full symbolic
coefficient is also available behind the ``symbolic`` flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coefficients import Coefficient, PolyCoefficient
from .errors import (
    ChartMismatchError,
    ContactConditionError,
    CsCompatibilityError,
    CsPotentialError,
    DegreeError,
    InternalConsistencyError,
)
from .forms import (
    Chart,
    DifferentialForm,
    LinearSubstitution,
    PolyVectorField,
    basis_form,
    bracket,
    contact_chart_over,
    coordinate_vector,
    exterior_derivative,
    horizontal_derivative,
    interior_product,
    wedge,
    zero_form,
)
from .grading import FiberCalculus, fiber_from_form, multi_indices
from .linalg import OperatorMatrix, SectionBasis
from .util import seeded_rng


@dataclass(frozen=True)
class ContactChart:
    """Contactification of a cs chart: coordinates (x1, y1, ..., xn, yn, t)."""

    n: int
    chart: Chart
    base: Chart
    beta: DifferentialForm  # promoted to the contact chart, dt-free
    alpha: DifferentialForm  # (dt + beta) / xi_scale
    xi: PolyVectorField  # xi_scale * d/dt
    xi_scale: Fraction = Fraction(1)

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def t_axis(self) -> int:
        return 2 * self.n

    def d_alpha(self) -> DifferentialForm:
        return exterior_derivative(self.alpha)

    def lef_form(self) -> DifferentialForm:
        """dt-free part of d(alpha): the structure two-form of the H-fibers."""
        return exterior_derivative(self.beta).scale(1 / self.xi_scale)

    def fiber(self) -> FiberCalculus:
        return fiber_from_form(self.lef_form(), self.n)

    def with_xi_scale(self, scale: Fraction | int) -> "ContactChart":
        """Same chart with the transversal field rescaled (alpha adjusts)."""
        scale = Fraction(scale)
        if scale == 0:
            raise ContactConditionError("transversal field cannot vanish")
        dt = basis_form(self.chart, (self.t_axis,))
        alpha = (dt + self.beta).scale(1 / scale)
        xi = coordinate_vector(self.chart, self.t_axis).scale(scale)
        return ContactChart(
            n=self.n,
            chart=self.chart,
            base=self.base,
            beta=self.beta,
            alpha=alpha,
            xi=xi,
            xi_scale=scale,
        )


def _sample_points(nvars: int, count: int = 5) -> list[list[Fraction]]:
    rng = seeded_rng("contact-samples", nvars, count)
    points = [[Fraction(0)] * nvars]
    for _ in range(count):
        points.append(
            [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(nvars)]
        )
    return points


def _nonvanishing(coeff: Coefficient, symbolic: bool) -> bool:
    """Sampling policy for certifying a nondegeneracy coefficient."""
    if coeff.is_zero():
        return False
    if isinstance(coeff, PolyCoefficient):
        if coeff.is_constant():
            return True
        if symbolic:
            # the exact coefficient itself is the certificate
            return True
        return all(
            coeff.evaluate(p) != 0 for p in _sample_points(coeff.nvars)
        )
    return coeff.constant_part() != 0


def check_cs_potential(beta: DifferentialForm, n: int, symbolic: bool = False) -> None:
    """Require d(beta) nondegenerate: top power of d(beta) nonvanishing."""
    if beta.degree != 1:
        raise CsPotentialError("a cs potential is a one-form")
    dbeta = exterior_derivative(beta)
    top = dbeta
    for _ in range(n - 1):
        top = wedge(top, dbeta)
    base_axes = tuple(a for a in range(beta.chart.dim) if a != beta.chart.t_axis)
    key = tuple(base_axes[: 2 * n])
    coeff = top.coefficient(key)
    if not _nonvanishing(coeff, symbolic):
        raise CsPotentialError("not a cs potential: top power of d(beta) vanishes")


def contactify(
    n: int,
    beta: DifferentialForm,
    xi_scale: Fraction | int = 1,
    symbolic: bool = False,
) -> ContactChart:
    """Build the contact chart over a cs potential.

    ``beta`` lives on the base chart (no transversal coordinate), is
    t-independent by construction and must have nondegenerate differential.
    """
    base = beta.chart
    if base.t_axis is not None:
        raise CsPotentialError("the potential lives on the base chart")
    if base.dim != 2 * n:
        raise CsPotentialError(f"potential chart has dimension {base.dim}, expected {2 * n}")
    if n < 2:
        raise CsPotentialError("contact charts need n >= 2")
    check_cs_potential(beta, n, symbolic=symbolic)

    chart = contact_chart_over(base)
    promoted_terms = {}
    for key, coeff in beta.terms.items():
        if isinstance(coeff, PolyCoefficient):
            promoted_terms[key] = coeff.pad(chart.ring.nvars)
        else:
            promoted_terms[key] = coeff
    promoted = DifferentialForm(chart, 1, promoted_terms, validated=True)
    scale = Fraction(xi_scale)
    if scale == 0:
        raise ContactConditionError("transversal field cannot vanish")
    dt = basis_form(chart, (chart.dim - 1,))
    alpha = (dt + promoted).scale(1 / scale)
    xi = coordinate_vector(chart, chart.dim - 1).scale(scale)
    cc = ContactChart(
        n=n, chart=chart, base=base, beta=promoted, alpha=alpha, xi=xi, xi_scale=scale
    )
    _check_contact_condition(cc, symbolic=symbolic)
    if not interior_product(cc.xi, cc.alpha).terms.get((), chart.zero_coeff()) == chart.one_coeff():
        raise InternalConsistencyError("alpha(xi) != 1")
    if not interior_product(cc.xi, cc.d_alpha()).is_zero():
        raise InternalConsistencyError("i_xi d(alpha) != 0")
    return cc


def volume_coefficient(cc: ContactChart) -> Coefficient:
    """The exact coefficient of alpha ^ (d alpha)^n on the top multi-index.

    This is the full symbolic certificate behind the sampling policy; for
    the standard models it is a nonzero constant.
    """
    top = cc.alpha
    da = cc.d_alpha()
    for _ in range(cc.n):
        top = wedge(top, da)
    return top.coefficient(tuple(range(cc.dim)))


def _check_contact_condition(cc: ContactChart, symbolic: bool = False) -> None:
    """alpha ^ (d alpha)^n must have an invertible top coefficient."""
    if not _nonvanishing(volume_coefficient(cc), symbolic):
        raise ContactConditionError("alpha ^ (d alpha)^n vanishes: not a contact form")


def standard_contact_chart(n: int, xi_scale: Fraction | int = 1) -> ContactChart:
    """alpha = dt + sum_i x_i dy_i on R^{2n+1} (up to the xi rescaling)."""
    from .forms import affine_cs_chart

    base = affine_cs_chart(n)
    beta = zero_form(base, 1)
    for i in range(n):
        beta = beta + basis_form(base, (2 * i + 1,)).times(base.coord_coeff(2 * i))
    return contactify(n, beta, xi_scale=xi_scale)


# -- frames and the Levi form --------------------------------------------------


def h_frame(cc: ContactChart) -> list[PolyVectorField]:
    """The frame X_v = d/dv - beta(d/dv) d/dt of H over the base coordinates."""
    frame = []
    for axis in range(2 * cc.n):
        X = coordinate_vector(cc.chart, axis)
        coeff = cc.beta.coefficient((axis,))
        if not coeff.is_zero():
            X = X + coordinate_vector(cc.chart, cc.t_axis, -coeff)
        frame.append(X)
    return frame


def _frame_basis(cc: ContactChart, label: str) -> SectionBasis:
    # labels carry a dummy block tag so SectionBasis helpers stay usable
    return SectionBasis(
        key=("h-frame", cc.chart.coords, label),
        labels=tuple(((label,), (axis,)) for axis in range(2 * cc.n)),
    )


def levi_form(cc: ContactChart, point: list[Fraction] | None = None) -> OperatorMatrix:
    """Matrix of the Levi bracket on the H-frame, values in Q trivialized by xi.

    Entry (i, j) is alpha([X_i, X_j]) evaluated at the point (default: the
    origin); nondegeneracy is part of the contact condition and is checked.
    """
    frame = h_frame(cc)
    point = point if point is not None else [Fraction(0)] * cc.chart.ring.nvars
    size = 2 * cc.n
    entries: dict[tuple[int, int], Fraction] = {}
    dense = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            lie = bracket(frame[i], frame[j])
            value = interior_product_vector(cc.alpha, lie)
            q = _coeff_at(value, point)
            if q:
                entries[(i, j)] = q
                dense[i][j] = q
    from .linalg import dense_rank

    if dense_rank(dense) != size:
        raise ContactConditionError("degenerate Levi form")
    basis = _frame_basis(cc, "H")
    return OperatorMatrix(basis, basis, entries)


def interior_product_vector(alpha: DifferentialForm, X: PolyVectorField) -> Coefficient:
    """alpha(X) as a scalar function."""
    value = interior_product(X, alpha)
    return value.terms.get((), alpha.chart.zero_coeff())


def _coeff_at(coeff: Coefficient, point: list[Fraction]) -> Fraction:
    if isinstance(coeff, PolyCoefficient):
        return coeff.evaluate(point)
    return coeff.constant_part()


def d_alpha_on_frame(cc: ContactChart, point: list[Fraction] | None = None) -> OperatorMatrix:
    """Matrix of d(alpha) on the H-frame; equals minus the Levi matrix."""
    frame = h_frame(cc)
    point = point if point is not None else [Fraction(0)] * cc.chart.ring.nvars
    size = 2 * cc.n
    da = cc.d_alpha()
    entries: dict[tuple[int, int], Fraction] = {}
    for i in range(size):
        # i_{X_i} da is the one-form v -> da(X_i, v)
        inner_i = interior_product(frame[i], da)
        for j in range(size):
            if i == j:
                continue
            value = interior_product(frame[j], inner_i).terms.get((), None)
            if value is None:
                continue
            q = _coeff_at(value, point)
            if q:
                entries[(i, j)] = q
    basis = _frame_basis(cc, "H")
    return OperatorMatrix(basis, basis, entries)


# -- the tensorial map and the cohomology bundles -------------------------------


def _fiber_basis(cc: ContactChart, k: int, q_power: int, flavor: str) -> SectionBasis:
    return SectionBasis(
        key=("h-fiber", cc.chart.coords, k, q_power, flavor),
        labels=tuple((("fiber",), (i,)) for i in range(_fiber_len(cc, k, flavor))),
    )


def _fiber_len(cc: ContactChart, k: int, flavor: str) -> int:
    fib = cc.fiber()
    if flavor == "full":
        return fib.dim(k)
    return fib.primitive_dim(k)


def partial_map(cc: ContactChart, k: int, point: list[Fraction] | None = None) -> OperatorMatrix:
    """The tensorial fiber map from (k-1)-H-forms twisted by Q* to (k+1)-H-forms.

    Realized as wedging with the structure two-form of the H-fibers (the
    normalization factor is fixed to one); injective for k <= n and
    surjective for k >= n.
    """
    if not 1 <= k <= 2 * cc.n:
        raise DegreeError("the tensorial map is defined for 1 <= k <= 2n")
    fib = cc.fiber()
    entries = {
        (r, c): v for (r, c), v in fib.wedge_map(k - 1).items()
    }
    rows = _fiber_basis(cc, k + 1, 0, "full")
    cols = _fiber_basis(cc, k - 1, -1, "full")
    return OperatorMatrix(rows, cols, entries)


@dataclass(frozen=True)
class HForm:
    """A section of an exterior power of H*, possibly twisted by Q*.

    Stored as a dt-free form on the contact chart; ``q_power`` is 0 for a
    plain H-form and -1 for the Q*-twist (the twist generator is alpha).
    """

    contact: ContactChart
    form: DifferentialForm
    q_power: int = 0

    def __post_init__(self) -> None:
        if self.q_power not in (0, -1):
            raise DegreeError("q_power must be 0 or -1")
        if self.form.uses_axis(self.contact.t_axis):
            raise DegreeError("H-forms are free of the transversal differential")

    @property
    def degree(self) -> int:
        return self.form.degree

    def is_zero(self) -> bool:
        return self.form.is_zero()

    def __add__(self, other: "HForm") -> "HForm":
        if other.q_power != self.q_power or other.contact is not self.contact:
            raise ChartMismatchError("H-form mismatch")
        return HForm(self.contact, self.form + other.form, self.q_power)

    def scale(self, q: Fraction | int) -> "HForm":
        return HForm(self.contact, self.form.scale(q), self.q_power)


@dataclass(frozen=True)
class HBasis:
    """Explicit fiber basis of the cohomology bundle of the tensorial map."""

    k: int
    q_power: int
    elements: tuple[HForm, ...]

    @property
    def dim(self) -> int:
        return len(self.elements)


def h_cohomology_basis(cc: ContactChart, k: int) -> HBasis:
    """Fiber basis of ker/im of the tensorial map at degree k.

    Primitive multi-index combinations for k <= n; primitive (k-1)-forms
    with the Q* twist for k > n.
    """
    if not 0 <= k <= 2 * cc.n + 1:
        raise DegreeError("degree out of range")
    fib = cc.fiber()
    if k <= cc.n:
        degree, q_power = k, 0
    else:
        degree, q_power = k - 1, -1
    vectors = fib.primitive_basis(degree)
    elements = []
    for vec in vectors:
        terms = {
            fib.indices(degree)[pos]: cc.chart.const(v) for pos, v in vec.items()
        }
        form = DifferentialForm(cc.chart, degree, terms, validated=True)
        elements.append(HForm(cc, form, q_power))
    return HBasis(k=k, q_power=q_power, elements=tuple(elements))


# -- lifting cs substitutions to contactomorphisms ------------------------------


@dataclass(frozen=True)
class LiftedMap:
    """A contact lift of a linear cs substitution, with its Reeb rescaling.

    ``substitution`` pulls forms on the source contact chart back to the
    target chart (the lift acts target -> source); ``scale`` is the factor
    lambda with pullback(alpha_src) = lambda * alpha_dst.
    """

    src: ContactChart
    dst: ContactChart
    substitution: LinearSubstitution
    scale: Fraction
    shift: PolyCoefficient

    def pullback(self, omega: DifferentialForm) -> DifferentialForm:
        return self.substitution.pullback(omega)


def _integrate_closed_one_form(rhs: DifferentialForm) -> PolyCoefficient:
    """Exact potential of a closed polynomial one-form on the base chart."""
    if not horizontal_derivative(rhs).is_zero():
        raise InternalConsistencyError("right-hand side is not closed")
    chart = rhs.chart
    nvars = chart.ring.nvars
    total = PolyCoefficient(nvars, {})
    for (axis,), coeff in rhs.terms.items():
        if not isinstance(coeff, PolyCoefficient):
            raise CsCompatibilityError("lifting needs polynomial data")
        for exp, q in coeff.terms.items():
            # homotopy formula: the monomial g dx_axis integrates to
            # g * x_axis / (|g| + 1)
            new = list(exp)
            new[axis] += 1
            degree = sum(exp)
            total = total + PolyCoefficient(
                nvars, {tuple(new): q / (degree + 1)}
            )
    return total


def lift_construction(
    chart_a: ContactChart,
    chart_b: ContactChart,
    matrix: list[list[Fraction]],
) -> LiftedMap:
    """Lift a linear symplectic substitution between the base charts.

    ``matrix`` gives the pullback of the source base coordinates in terms
    of the target ones.  The substitution must intertwine the two structure
    forms up to a nonzero rational factor c; the lift then rescales t by
    lambda = c and shears it by the exact potential of lambda*beta_b -
    pullback(beta_a).  The returned map satisfies
    ``pullback(alpha_a) == lambda * alpha_b`` exactly.
    """
    if chart_a.n != chart_b.n:
        raise CsCompatibilityError("charts have different ranks")
    if chart_a.chart.ring.kind != "poly" or chart_b.chart.ring.kind != "poly":
        raise CsCompatibilityError("lifting is implemented for polynomial charts")
    n = chart_a.n
    rows = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
        raise CsCompatibilityError("substitution matrix has the wrong shape")

    base_sub = LinearSubstitution(src=chart_a.base, dst=chart_b.base, matrix=rows)
    dbeta_a = exterior_derivative(_restrict_to_base(chart_a.beta, chart_a.base))
    dbeta_b = exterior_derivative(_restrict_to_base(chart_b.beta, chart_b.base))
    pulled = base_sub.pullback(dbeta_a)
    scale = _form_ratio(pulled, dbeta_b)

    beta_a_base = _restrict_to_base(chart_a.beta, chart_a.base)
    beta_b_base = _restrict_to_base(chart_b.beta, chart_b.base)
    rhs = beta_b_base.scale(scale) - base_sub.pullback(beta_a_base)
    shift = _integrate_closed_one_form(rhs)

    full_sub = LinearSubstitution(
        src=chart_a.chart,
        dst=chart_b.chart,
        matrix=rows,
        t_scale=scale * chart_a.xi_scale / chart_b.xi_scale,
        shift=shift.scale(chart_a.xi_scale),
    )
    lift = LiftedMap(
        src=chart_a, dst=chart_b, substitution=full_sub, scale=scale, shift=shift
    )
    check = lift.pullback(chart_a.alpha) - chart_b.alpha.scale(scale)
    if not check.is_zero():
        raise InternalConsistencyError("lift does not rescale the contact form")
    return lift


def _form_ratio(left: DifferentialForm, right: DifferentialForm) -> Fraction:
    """The constant c with left = c * right, for constant-coefficient forms."""
    if right.is_zero():
        raise CsCompatibilityError("degenerate comparison form")
    key, coeff = next(iter(sorted(right.terms.items())))
    if not coeff.is_constant():
        raise CsCompatibilityError("comparison needs constant-coefficient forms")
    lcoeff = left.terms.get(key)
    if lcoeff is None or not lcoeff.is_constant():
        raise CsCompatibilityError("substitution is not cs-compatible")
    c = lcoeff.constant_part() / coeff.constant_part()
    if c == 0 or not (left - right.scale(c)).is_zero():
        raise CsCompatibilityError("substitution is not cs-compatible")
    return c


def _restrict_to_base(omega: DifferentialForm, base: Chart) -> DifferentialForm:
    """Drop the transversal coordinate from a dt-free, t-independent form."""
    terms = {}
    for key, coeff in omega.terms.items():
        if isinstance(coeff, PolyCoefficient) and coeff.nvars == base.ring.nvars + 1:
            coeff = coeff.restrict(base.ring.nvars)
        terms[key] = coeff
    return DifferentialForm(base, omega.degree, terms)


def exact_sequence_dims(n: int) -> list[tuple[int, int, int]]:
    """Per degree k: (dim full k-forms, dim dt-free part, dim twisted part).

    The exact sequence of bundles over the chart splits the full exterior
    power as C(2n+1, k) = C(2n, k) + C(2n, k-1); the constructed bases
    realize both summands explicitly.
    """
    from math import comb

    out = []
    for k in range(1, 2 * n + 1):
        full = len(multi_indices(2 * n + 1, k))
        h_part = len(multi_indices(2 * n, k))
        q_part = len(multi_indices(2 * n, k - 1))
        assert full == comb(2 * n + 1, k)
        out.append((full, h_part, q_part))
    return out
