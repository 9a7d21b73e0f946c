"""Property tests for the structural invariants."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from densitylab import (
    BuckFactorial,
    CantorBase,
    CantorSeries,
    Complement,
    DriverSequence,
    FreeGroupCoset,
    IntervalUnion,
    JordanRational,
    PrimePower,
    ProductGroups,
    ResidueUnion,
    SemigroupElement,
    SequenceSpec,
    SparseMin,
    Squarefree,
    SubsemigroupH,
    FullSupportMin,
    PerfectPower,
    cantor_factorial,
    cantor_factorial_inverse,
    coset_count,
    digits,
    divisor_count,
    from_digits,
    measurability_report,
    metric_rho,
    outer_density,
    parse_set,
    set_from_json,
    set_to_json,
    share_cells,
    star_discrepancy,
    ud_in_Z_report,
    vdc,
    vdc_inverse,
    verify_refinement,
)

SYSTEMS = [
    (BuckFactorial(), 4),
    (PrimePower(3), 3),
    (CantorSeries(CantorBase.from_moduli([1, 2, 6, 12, 60])), 4),
    (JordanRational(), 12),
    (FreeGroupCoset(), 2),
    (ProductGroups([2, 3]), 3),
]

residue_sets = st.lists(
    st.tuples(st.integers(0, 30), st.integers(1, 12)).map(lambda t: (t[0] % t[1], t[1])), min_size=1, max_size=3
).map(lambda cs: ResidueUnion(tuple(cs)))

fractions01 = st.tuples(st.integers(0, 48), st.integers(1, 48)).filter(lambda t: t[0] <= t[1]).map(lambda t: Fraction(*t))
interval_sets = st.lists(
    st.tuples(fractions01, fractions01).filter(lambda t: t[0] < t[1]), min_size=1, max_size=3
).map(lambda ivs: IntervalUnion(tuple(ivs)))

semigroup_specs = st.sampled_from(
    [Squarefree(), PerfectPower(2), PerfectPower(3), SubsemigroupH((2, 3)), SubsemigroupH((1, 2)), SparseMin(2), SparseMin(3), FullSupportMin(1), FullSupportMin(2)]
)
elements = st.lists(st.integers(0, 5), max_size=5).map(lambda es: SemigroupElement(tuple(es)))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SYSTEMS))
def test_masses_sum_to_one(case):
    system, level = case
    assert sum((system.mass(c) for c in system.cells(level)), Fraction(0)) == 1


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SYSTEMS))
def test_children_partition_parents(case):
    system, _ = case
    assert verify_refinement(system, range(1, 4)).passed


@settings(max_examples=60, deadline=None)
@given(residue_sets, st.integers(2, 5))
def test_residue_closed_form_equals_exhaustive(spec, level):
    buck = BuckFactorial()
    closed = outer_density(buck, spec, level, mode="closed").value
    brute = outer_density(buck, spec, level, mode="exhaustive")
    assert closed == brute.value
    # exhaustive value is the mass of the cells answered "yes"
    assert brute.value == Fraction(brute.cells_met, buck.cell_count(level))


@settings(max_examples=60, deadline=None)
@given(interval_sets, st.integers(1, 30))
def test_interval_closed_form_equals_exhaustive(spec, level):
    j = JordanRational()
    assert outer_density(j, spec, level, mode="closed").value == outer_density(j, spec, level, mode="exhaustive").value


@settings(max_examples=60, deadline=None)
@given(residue_sets, st.integers(2, 5))
def test_defect_nonnegative(spec, level):
    rep = measurability_report(BuckFactorial(), spec, level)
    assert rep.defect >= 0
    assert outer_density(BuckFactorial(), Complement(spec), level).value == rep.complement_outer.value


@settings(max_examples=40, deadline=None)
@given(residue_sets, st.integers(2, 5))
def test_outer_density_decreases_along_chain(spec, level):
    buck = BuckFactorial()
    assert outer_density(buck, spec, level + 1).value <= outer_density(buck, spec, level).value


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 11), st.integers(1, 10**7))
def test_vdc_round_trip(p, n):
    q = vdc(p, n)
    assert 0 < q < 1 and q.denominator > 0
    assert vdc_inverse(p, q) == n


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**9))
def test_factorial_round_trip_and_digit_bounds(n):
    assert cantor_factorial_inverse(cantor_factorial(n)) == n
    base = CantorBase.factorial()
    ds = digits(base, n)
    assert all(0 <= d <= j for j, d in enumerate(ds, 1))
    assert from_digits(base, ds) == n


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(1, 10**6))
def test_metric_axioms(x, y, z):
    buck = BuckFactorial()
    dxy, dyz, dxz = (metric_rho(buck, a, b, 16) for a, b in ((x, y), (y, z), (x, z)))
    assert dxy == metric_rho(buck, y, x, 16)
    # below 16! distinct naturals are always split by some level <= 16
    assert (dxy == 0) == (x == y) == share_cells(buck, x, y, 16)
    assert dxz <= dxy + dyz


@settings(max_examples=80, deadline=None)
@given(semigroup_specs, st.integers(1, 4))
def test_divisor_closed_equals_exhaustive(spec, n):
    c, e = divisor_count(spec, n, mode="closed"), divisor_count(spec, n, mode="exhaustive")
    assert c.count == e.count <= c.total
    assert coset_count(spec, n, mode="closed").count == coset_count(spec, n, mode="exhaustive").count


@settings(max_examples=100, deadline=None)
@given(elements, elements)
def test_element_canonical_form(a, b):
    assert not a.exponents or a.exponents[-1] != 0
    assert (a * b).quotient(b) == a
    assert a.divides(a * b)


@settings(max_examples=60, deadline=None)
@given(residue_sets)
def test_set_json_round_trip(spec):
    assert set_from_json(set_to_json(spec)) == spec
    assert set_from_json(set_to_json(~spec)) == ~spec


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 50), st.integers(16, 200), st.integers(1, 60))
def test_shuffle_driver_values(seed, count, block):
    vals = DriverSequence.shuffle(seed, block).values(count)
    assert all(v >= 1 for v in vals)
    assert len(set(vals)) == count
    rep = ud_in_Z_report(DriverSequence.shuffle(seed, block), [2, 3], count)
    assert all(0 <= r.deviation <= 1 for r in rep.rows)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 300))
def test_star_discrepancy_bounds(n):
    pts = SequenceSpec.vdc(2).points(n)
    d = star_discrepancy(pts)
    assert Fraction(1, 2 * n) <= d <= 1


def test_parse_set_is_total_on_printed_residues():
    assert parse_set("residue:2+(5)") == ResidueUnion(((2, 5),))
