"""Sparse exterior algebra on a chart.

A chart fixes an ordered coordinate system, a coefficient ring and a weight
for every coordinate.  A differential form of degree k is a sparse map from
strictly increasing k-tuples of coordinate axes to ring coefficients; a
polyvector field of degree 1 or 2 uses the same key discipline.

Conventions, fixed once and used everywhere:

* wedge sign = sign of the permutation sorting the concatenated index list;
* interior product of a degree-2 polyvector term on axes (a, b) inserts
  d/da into the first slot and d/db into the second, so that
  ``i_{(a,b)} (dx_a ^ dx_b) = +1``;
* the Lie derivative is the Cartan formula ``i_X d + d i_X``.

On a contact chart the coordinate order is (x1, y1, ..., xn, yn, t) with
weights (1, ..., 1, 2); on a cs chart (x1, y1, ..., xn, yn) with weight 1
each.  Truncation by total weight (coefficient weight + form weight, the
transversal coordinate and its differential counting twice) then produces
finite-dimensional subcomplexes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .coefficients import (
    Coefficient,
    PolyCoefficient,
    Ring,
    coefficient_from_json,
    coefficient_to_json,
)
from .errors import (
    ChartMismatchError,
    DegreeError,
    InternalConsistencyError,
    InvalidAxisError,
    ReebInvarianceError,
    UnsupportedRingOperationError,
)

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class Chart:
    """An ordered coordinate chart with a coefficient ring and weights.

    ``t_axis`` marks the transversal coordinate of a contact chart (always
    the last axis); cs charts have none.  In the trig ring the transversal
    coordinate has no ring variable: sections are invariant along it, and
    its formal derivative is zero.
    """

    coords: tuple[str, ...]
    ring: Ring
    weights: tuple[int, ...]
    t_axis: int | None = None

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.coords):
            raise InvalidAxisError("one weight per coordinate required")
        if self.t_axis is not None and self.t_axis != len(self.coords) - 1:
            raise InvalidAxisError("the transversal coordinate must come last")
        expected = len(self.coords)
        if self.t_axis is not None and self.ring.kind == "trig":
            expected -= 1
        if self.ring.nvars != expected:
            raise InvalidAxisError(
                f"ring has {self.ring.nvars} variables, chart needs {expected}"
            )

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def base_axes(self) -> tuple[int, ...]:
        return tuple(a for a in range(self.dim) if a != self.t_axis)

    def axis_var(self, axis: int) -> int | None:
        """Ring variable carrying the given coordinate axis, if any."""
        if not 0 <= axis < self.dim:
            raise InvalidAxisError(f"axis {axis} out of range")
        if axis == self.t_axis and self.ring.kind == "trig":
            return None
        return axis

    def var_weights(self) -> tuple[int, ...]:
        """Weights of the ring variables, in ring order."""
        return tuple(
            self.weights[a] for a in range(self.dim) if self.axis_var(a) is not None
        )

    def zero_coeff(self) -> Coefficient:
        return self.ring.zero()

    def one_coeff(self) -> Coefficient:
        return self.ring.one()

    def const(self, value: Fraction | int) -> Coefficient:
        return self.ring.const(value)

    def coord_coeff(self, axis: int) -> Coefficient:
        var = self.axis_var(axis)
        if var is None:
            raise UnsupportedRingOperationError(
                "the transversal coordinate is not a trig ring element"
            )
        return self.ring.var(var)


def affine_cs_chart(n: int) -> Chart:
    """The affine chart R^{2n} with coordinates (x1, y1, ..., xn, yn)."""
    coords = _base_names(n)
    from .coefficients import poly_ring

    return Chart(coords=coords, ring=poly_ring(2 * n), weights=(1,) * (2 * n))


def torus_cs_chart(n: int) -> Chart:
    """The torus T^{2n} with angle coordinates (x1, y1, ..., xn, yn)."""
    coords = _base_names(n)
    from .coefficients import trig_ring

    return Chart(coords=coords, ring=trig_ring(2 * n), weights=(1,) * (2 * n))


def contact_chart_over(base: Chart) -> Chart:
    """Extend a cs chart by the transversal coordinate t (weight 2)."""
    from .coefficients import poly_ring

    ring = base.ring
    if ring.kind == "poly":
        ring = poly_ring(ring.nvars + 1)
    return Chart(
        coords=base.coords + ("t",),
        ring=ring,
        weights=base.weights + (2,),
        t_axis=len(base.coords),
    )


def _base_names(n: int) -> tuple[str, ...]:
    names: list[str] = []
    for i in range(1, n + 1):
        names.extend((f"x{i}", f"y{i}"))
    return tuple(names)


# -- index combinatorics (single source of sign truth) ----------------------


def merge_wedge(left: MultiIndex, right: MultiIndex) -> tuple[int, MultiIndex] | None:
    """Sign and sorted key for dx^left ^ dx^right; None on a repeated axis."""
    merged = list(left)
    sign = 1
    for axis in right:
        pos = len(merged)
        while pos > 0 and merged[pos - 1] > axis:
            pos -= 1
        if pos > 0 and merged[pos - 1] == axis:
            return None
        sign *= -1 if (len(merged) - pos) % 2 else 1
        merged.insert(pos, axis)
    return sign, tuple(merged)


def contract_axis(key: MultiIndex, axis: int) -> tuple[int, MultiIndex] | None:
    """Sign and key for inserting d/d(axis) into the first slot of dx^key."""
    try:
        pos = key.index(axis)
    except ValueError:
        return None
    sign = -1 if pos % 2 else 1
    return sign, key[:pos] + key[pos + 1 :]


def validate_key(key: MultiIndex, degree: int, dim: int) -> None:
    if len(key) != degree:
        raise DegreeError(f"key {key} has length {len(key)}, expected {degree}")
    if any(not 0 <= a < dim for a in key):
        raise InvalidAxisError(f"key {key} exceeds chart dimension {dim}")
    if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
        raise InvalidAxisError(f"key {key} is not strictly increasing")


class _SparseGraded:
    """Shared storage/arithmetic for forms and polyvector fields."""

    __slots__ = ("chart", "degree", "terms")

    def __init__(
        self,
        chart: Chart,
        degree: int,
        terms: Mapping[MultiIndex, Coefficient],
        validated: bool = False,
    ):
        if degree < 0:
            raise DegreeError("negative degree")
        self.chart = chart
        self.degree = degree
        clean: dict[MultiIndex, Coefficient] = {}
        for key, coeff in terms.items():
            if coeff.is_zero():
                continue
            if not validated:
                validate_key(key, degree, chart.dim)
            clean[key] = coeff
        self.terms = clean

    def _check(self, other: "_SparseGraded") -> None:
        if other.chart != self.chart:
            raise ChartMismatchError("operands live on different charts")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is type(self)
            and other.chart == self.chart
            and other.degree == self.degree
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((type(self).__name__, self.degree, frozenset(self.terms)))

    def __repr__(self) -> str:
        what = type(self).__name__
        if not self.terms:
            return f"{what}(deg={self.degree}, 0)"
        names = self.chart.coords
        bits = []
        for key in sorted(self.terms):
            label = "^".join(f"d{names[a]}" for a in key) or "1"
            bits.append(f"[{label}] {self.terms[key]!r}")
        return f"{what}(deg={self.degree}, " + " + ".join(bits) + ")"


class DifferentialForm(_SparseGraded):
    """Degree-k form: sparse map from ordered multi-indices to coefficients."""

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check(other)
        if other.degree != self.degree:
            raise DegreeError("cannot add forms of different degrees")
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out[key] + coeff if key in out else coeff
        return DifferentialForm(self.chart, self.degree, out, validated=True)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(
            self.chart, self.degree, {k: -c for k, c in self.terms.items()}, validated=True
        )

    def scale(self, q: Fraction | int) -> "DifferentialForm":
        return DifferentialForm(
            self.chart,
            self.degree,
            {k: c.scale(q) for k, c in self.terms.items()},
            validated=True,
        )

    def times(self, f: Coefficient) -> "DifferentialForm":
        """Multiply by a scalar function."""
        return DifferentialForm(
            self.chart, self.degree, {k: f * c for k, c in self.terms.items()}, validated=True
        )

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        return wedge(self, other)

    def d(self) -> "DifferentialForm":
        return exterior_derivative(self)

    def coefficient(self, key: MultiIndex) -> Coefficient:
        return self.terms.get(tuple(key), self.chart.zero_coeff())

    def uses_axis(self, axis: int) -> bool:
        return any(axis in key for key in self.terms)


class PolyVectorField(_SparseGraded):
    """Degree 1 or 2 polyvector field with the same key discipline as forms."""

    def __init__(self, chart, degree, terms, validated=False):
        if degree not in (1, 2):
            raise DegreeError("polyvector fields here have degree 1 or 2")
        super().__init__(chart, degree, terms, validated)

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        if other.degree != self.degree:
            raise DegreeError("cannot add polyvectors of different degrees")
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            out[key] = out[key] + coeff if key in out else coeff
        return PolyVectorField(self.chart, self.degree, out, validated=True)

    def scale(self, q: Fraction | int) -> "PolyVectorField":
        return PolyVectorField(
            self.chart,
            self.degree,
            {k: c.scale(q) for k, c in self.terms.items()},
            validated=True,
        )


def zero_form(chart: Chart, degree: int) -> DifferentialForm:
    return DifferentialForm(chart, degree, {})


def function_form(chart: Chart, f: Coefficient) -> DifferentialForm:
    return DifferentialForm(chart, 0, {(): f})


def basis_form(chart: Chart, key: Iterable[int], coeff: Coefficient | None = None) -> DifferentialForm:
    key = tuple(key)
    c = coeff if coeff is not None else chart.one_coeff()
    return DifferentialForm(chart, len(key), {key: c})


def coordinate_vector(chart: Chart, axis: int, coeff: Coefficient | None = None) -> PolyVectorField:
    c = coeff if coeff is not None else chart.one_coeff()
    return PolyVectorField(chart, 1, {(axis,): c})


# -- operations --------------------------------------------------------------


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Exterior product with the permutation-sign convention."""
    a._check(b)
    degree = a.degree + b.degree
    out: dict[MultiIndex, Coefficient] = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            merged = merge_wedge(ka, kb)
            if merged is None:
                continue
            sign, key = merged
            piece = (ca * cb).scale(sign)
            out[key] = out[key] + piece if key in out else piece
    return DifferentialForm(a.chart, degree, out, validated=True)


def exterior_derivative(omega: DifferentialForm) -> DifferentialForm:
    """d(f dx^I) = sum_j (d_j f) dx_j ^ dx^I over all chart axes."""
    return _derivative_over_axes(omega, range(omega.chart.dim))


def horizontal_derivative(omega: DifferentialForm) -> DifferentialForm:
    """Exterior derivative in the base directions only (t excluded)."""
    return _derivative_over_axes(omega, omega.chart.base_axes)


def _derivative_over_axes(omega: DifferentialForm, axes: Iterable[int]) -> DifferentialForm:
    chart = omega.chart
    out: dict[MultiIndex, Coefficient] = {}
    for key, coeff in omega.terms.items():
        for axis in axes:
            var = chart.axis_var(axis)
            if var is None:
                continue
            df = coeff.partial(var)
            if df.is_zero():
                continue
            merged = merge_wedge((axis,), key)
            if merged is None:
                continue
            sign, new_key = merged
            piece = df.scale(sign)
            out[new_key] = out[new_key] + piece if new_key in out else piece
    return DifferentialForm(chart, omega.degree + 1, out, validated=True)


def t_derivative(omega: DifferentialForm, scale: Fraction = Fraction(1)) -> DifferentialForm:
    """Coefficientwise derivative along the transversal coordinate, scaled."""
    chart = omega.chart
    if chart.t_axis is None:
        raise InvalidAxisError("chart has no transversal coordinate")
    var = chart.axis_var(chart.t_axis)
    if var is None:
        return zero_form(chart, omega.degree)
    out = {}
    for key, coeff in omega.terms.items():
        df = coeff.partial(var).scale(scale)
        if not df.is_zero():
            out[key] = df
    return DifferentialForm(chart, omega.degree, out, validated=True)


def interior_product(P: PolyVectorField, omega: DifferentialForm) -> DifferentialForm:
    """Contraction by a degree-1 or degree-2 polyvector field.

    Degree 2 uses the first-slots convention: a term on axes (a, b) acts as
    phi |-> phi(d/da, d/db, ...).
    """
    P._check(omega)
    if omega.degree < P.degree:
        raise DegreeError(
            f"cannot contract a degree-{P.degree} polyvector into a degree-{omega.degree} form"
        )
    out: dict[MultiIndex, Coefficient] = {}
    for pkey, pcoeff in P.terms.items():
        for key, coeff in omega.terms.items():
            if P.degree == 1:
                hit = contract_axis(key, pkey[0])
                if hit is None:
                    continue
                sign, new_key = hit
            else:
                first = contract_axis(key, pkey[0])
                if first is None:
                    continue
                s1, mid = first
                second = contract_axis(mid, pkey[1])
                if second is None:
                    continue
                s2, new_key = second
                sign = s1 * s2
            piece = (pcoeff * coeff).scale(sign)
            out[new_key] = out[new_key] + piece if new_key in out else piece
    return DifferentialForm(omega.chart, omega.degree - P.degree, out, validated=True)


def lie_derivative(X: PolyVectorField, omega: DifferentialForm) -> DifferentialForm:
    """Cartan formula: L_X = i_X d + d i_X (X of degree 1)."""
    if X.degree != 1:
        raise DegreeError("Lie derivative needs a vector field")
    inner = interior_product(X, omega) if omega.degree >= 1 else zero_form(omega.chart, 0)
    left = interior_product(X, exterior_derivative(omega))
    if omega.degree >= 1:
        return left + exterior_derivative(inner)
    return left


def bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """Lie bracket of two vector fields, computed componentwise."""
    if X.degree != 1 or Y.degree != 1:
        raise DegreeError("bracket needs two vector fields")
    X._check(Y)
    chart = X.chart
    out: dict[MultiIndex, Coefficient] = {}
    for (b,), xb in X.terms.items():
        var = chart.axis_var(b)
        for (a,), ya in Y.terms.items():
            if var is not None:
                dya = ya.partial(var)
                if not dya.is_zero():
                    key = (a,)
                    piece = xb * dya
                    out[key] = out[key] + piece if key in out else piece
    for (b,), yb in Y.terms.items():
        var = chart.axis_var(b)
        for (a,), xa in X.terms.items():
            if var is not None:
                dxa = xa.partial(var)
                if not dxa.is_zero():
                    key = (a,)
                    piece = -(yb * dxa)
                    out[key] = out[key] + piece if key in out else piece
    return PolyVectorField(chart, 1, out, validated=True)


def split_off_dt(
    omega: DifferentialForm, alpha: DifferentialForm, xi: PolyVectorField
) -> tuple[DifferentialForm, DifferentialForm]:
    """Split an invariant form as omega = phi1 + alpha ^ phi2 with i_xi phi_j = 0.

    Requires L_xi omega = 0 and alpha(xi) = 1; phi2 = i_xi omega and phi1 is
    the remainder, both free of the transversal differential, so they are
    exactly the pullback data of the quotient projection.  Reassembly via
    ``reassemble_dt`` is the exact inverse.
    """
    lie = lie_derivative(xi, omega)
    if not lie.is_zero():
        key, coeff = next(iter(sorted(lie.terms.items())))
        raise ReebInvarianceError(
            f"form is not invariant along the transversal field: term {key} -> {coeff!r}"
        )
    phi2 = interior_product(xi, omega) if omega.degree >= 1 else zero_form(omega.chart, 0)
    if omega.degree >= 1:
        phi1 = omega - wedge(alpha, phi2)
        if not interior_product(xi, phi1).is_zero():
            raise InternalConsistencyError("splitting left a transversal component")
    else:
        phi1 = omega
    return phi1, phi2


def reassemble_dt(
    phi1: DifferentialForm, phi2: DifferentialForm, alpha: DifferentialForm
) -> DifferentialForm:
    """Inverse of split_off_dt: phi1 + alpha ^ phi2."""
    return phi1 + wedge(alpha, phi2)


def weight_of_key(chart: Chart, key: MultiIndex) -> int:
    return sum(chart.weights[a] for a in key)


def weight_split(omega: DifferentialForm) -> dict[int, DifferentialForm]:
    """Split a poly-ring form into total-weight homogeneous parts."""
    if omega.chart.ring.kind != "poly":
        raise UnsupportedRingOperationError("weight grading applies to the poly ring")
    var_weights = omega.chart.var_weights()
    buckets: dict[int, dict[MultiIndex, Coefficient]] = {}
    for key, coeff in omega.terms.items():
        base = weight_of_key(omega.chart, key)
        for w, part in coeff.weight_split(var_weights).items():
            buckets.setdefault(base + w, {})[key] = part
    return {
        w: DifferentialForm(omega.chart, omega.degree, terms, validated=True)
        for w, terms in sorted(buckets.items())
    }


# -- substitutions -----------------------------------------------------------


@dataclass(frozen=True)
class LinearSubstitution:
    """Pullback data of a map (base', t') -> (M . base', t_scale * t' + shift).

    ``matrix[i][j]`` is the coefficient of the j-th target coordinate in the
    image of the i-th source base coordinate, so the pullback of the source
    coordinate function v_i is  sum_j matrix[i][j] v_j'.  ``shift`` is a
    polynomial in the target base coordinates; both charts must carry the
    poly ring.
    """

    src: Chart
    dst: Chart
    matrix: tuple[tuple[Fraction, ...], ...]
    t_scale: Fraction = Fraction(1)
    shift: PolyCoefficient | None = None

    def pullback_coefficient(self, f: Coefficient) -> Coefficient:
        if not isinstance(f, PolyCoefficient):
            raise UnsupportedRingOperationError("substitutions act on the poly ring")
        images: list[PolyCoefficient] = []
        nbase = len(self.matrix)
        for i in range(nbase):
            terms = {}
            for j, q in enumerate(self.matrix[i]):
                if q:
                    exp = [0] * self.dst.ring.nvars
                    exp[j] = 1
                    terms[tuple(exp)] = q
            images.append(PolyCoefficient(self.dst.ring.nvars, terms))
        if self.src.t_axis is not None:
            nvars = self.dst.ring.nvars
            t_exp = [0] * nvars
            t_exp[self.dst.t_axis] = 1
            t_image = PolyCoefficient(nvars, {tuple(t_exp): self.t_scale})
            if self.shift is not None:
                t_image = t_image + self.shift.pad(nvars)
            images.append(t_image)
        return f.substitute(images)

    def pullback_differential(self, axis: int) -> DifferentialForm:
        if axis == self.src.t_axis:
            nvars = self.dst.ring.nvars
            out = basis_form(self.dst, (self.dst.t_axis,)).scale(self.t_scale)
            if self.shift is not None:
                out = out + exterior_derivative(
                    function_form(self.dst, self.shift.pad(nvars))
                )
            return out
        terms = {}
        for j, q in enumerate(self.matrix[axis]):
            if q:
                terms[(j,)] = self.dst.const(q)
        return DifferentialForm(self.dst, 1, terms, validated=True)

    def pullback(self, omega: DifferentialForm) -> DifferentialForm:
        if omega.chart != self.src:
            raise ChartMismatchError("form does not live on the substitution source")
        total = zero_form(self.dst, omega.degree)
        for key, coeff in omega.terms.items():
            piece = function_form(self.dst, self.pullback_coefficient(coeff))
            for axis in key:
                piece = wedge(piece, self.pullback_differential(axis))
            total = total + piece
        return total


# -- serialization ------------------------------------------------------------


def form_to_json(omega: DifferentialForm) -> dict:
    return {
        "degree": omega.degree,
        "terms": [
            {"idx": list(key), "coef": coefficient_to_json(coeff)}
            for key, coeff in sorted(omega.terms.items())
        ],
    }


def form_from_json(obj: dict, chart: Chart) -> DifferentialForm:
    degree = int(obj["degree"])
    terms = {}
    for item in obj.get("terms", []):
        key = tuple(int(a) for a in item["idx"])
        terms[key] = coefficient_from_json(item["coef"], nvars=chart.ring.nvars)
    return DifferentialForm(chart, degree, terms)
