import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncclab import field
from ncclab.errors import DivisionByZero, DuplicatePoint, LengthMismatch, MixedFields, NoSuchRoot, NotPrime

GF17 = field.PrimeField(17)
GF7 = field.PrimeField(7)

# (p, n) pairs with n | p - 1; two are not powers of two
FIXTURES = [(17, 16), (17, 4), (257, 256), (13, 12), (13, 3), (97, 32), (2013265921, 8)]


def python_dft(a, sigma, p):
    """Schoolbook sums with Python ints: no numpy, no overflow."""
    n = len(a)
    return [sum(a[j] * pow(sigma, i * j, p) for j in range(n)) % p for i in range(n)]


def brute_root(p, n):
    """Smallest generator found by enumerating element orders, raised to (p-1)/n."""
    def order(x):
        k, y = 1, x
        while y != 1:
            y = y * x % p
            k += 1
        return k
    g = next(x for x in range(1, p) if order(x) == p - 1)
    return pow(g, (p - 1) // n, p)


def test_inverse_of_three_mod_17():
    oracle = next(x for x in range(1, 17) if 3 * x % 17 == 1)
    assert oracle == 6
    assert GF17(3).inv() == 6
    assert field.field_arith(GF17(3), None, "inv") == 6


def test_inverse_of_sixteen_mod_17():
    assert GF17.inv(16) == 16


@given(st.integers(0, 16))
def test_multiplicative_identity(a):
    assert GF17(a) * GF17(1) == GF17(a)
    assert field.field_arith(GF17(a), GF17(1), "mul") == a


@given(st.integers(1, 16), st.integers(0, 16))
def test_division_undoes_multiplication(a, b):
    assert (GF17(b) * a) / a == b


def test_field_errors():
    with pytest.raises(DivisionByZero):
        GF17(0).inv()
    with pytest.raises(MixedFields):
        GF17(1) + GF7(1)
    with pytest.raises(MixedFields):
        field.field_arith(GF17(1), GF7(1), "add")
    with pytest.raises(NotPrime):
        field.PrimeField(15)
    with pytest.raises(NotPrime):
        field.PrimeField(2**31 + 11)


def test_negative_power_is_inverse_power():
    assert GF17(3) ** -2 == GF17(3).inv() ** 2


@pytest.mark.parametrize("p,n,sigma", [(17, 4, 13), (17, 16, 3)])
def test_root_of_unity_frozen(p, n, sigma):
    assert brute_root(p, n) == sigma
    assert field.find_root_of_unity(field.PrimeField(p), n).sigma == sigma


def test_root_of_unity_against_brute_force():
    for p in (13, 17, 19, 23, 29, 31, 37, 41, 97, 101):
        for n in range(1, p):
            if (p - 1) % n == 0:
                root = field.find_root_of_unity(field.PrimeField(p), n)
                assert root.sigma.value == brute_root(p, n)


def test_no_root_when_n_does_not_divide():
    with pytest.raises(NoSuchRoot):
        field.find_root_of_unity(GF17, 5)
    with pytest.raises(NoSuchRoot):
        field.RootOfUnity(GF17(2), 16)  # 2 has order 8


def root16():
    return field.find_root_of_unity(GF17, 16)


def test_constant_polynomial_transforms_to_constant():
    assert list(field.ffft([7] + [0] * 15, root16())) == [7] * 16


def test_monomial_x_evaluates_to_powers():
    out = field.ffft([0, 1] + [0] * 14, root16())
    assert list(out) == [pow(3, i, 17) for i in range(16)]
    assert list(out[:5]) == [1, 3, 9, 10, 13]


def test_one_plus_two_x_frozen():
    a = [1, 2] + [0] * 14
    assert python_dft(a, 3, 17)[:3] == [3, 7, 2]
    assert list(field.ffft(a, root16())[:3]) == [3, 7, 2]


def test_inverse_of_constant_values():
    assert list(field.ffft_inverse([5] * 16, root16())) == [5] + [0] * 15


@pytest.mark.parametrize("p,n", FIXTURES)
def test_fast_transform_matches_python_sums(p, n):
    rng = np.random.default_rng(p + n)
    root = field.find_root_of_unity(field.PrimeField(p), n)
    for _ in range(5):
        a = [int(x) for x in rng.integers(0, p, size=n)]
        want = python_dft(a, root.sigma.value, p)
        assert [int(x) for x in field.ffft(a, root)] == want
        assert [int(x) for x in field.naive_dft(a, root)] == want
        assert [int(x) for x in field.ffft_inverse(field.ffft(a, root), root)] == a


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(FIXTURES), st.data())
def test_round_trip_property(pn, data):
    p, n = pn
    root = field.find_root_of_unity(field.PrimeField(p), n)
    a = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)), dtype=np.int64)
    assert np.array_equal(field.ffft_inverse(field.ffft(a, root), root), a)
    assert np.array_equal(field.ffft(a, root), field.naive_dft(a, root))


def test_inverse_equals_scaled_transform_with_inverse_root():
    root = root16()
    rng = np.random.default_rng(0)
    b = rng.integers(0, 17, size=16)
    lhs = 16 * field.ffft_inverse(b, root) % 17
    assert np.array_equal(lhs, field.ffft(b, root.inverse()))


def test_batched_transform_matches_rows():
    root = root16()
    rng = np.random.default_rng(1)
    a = rng.integers(0, 17, size=(4, 16))
    batch = field.ffft(a, root)
    for row, out in zip(a, batch):
        assert np.array_equal(field.ffft(row, root), out)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        field.ffft([1, 2, 3], root16())


def test_poly_eval_frozen():
    x = GF7(3)
    oracle = (2 + 3 * 3 + 3 ** 2) % 7
    assert oracle == 6
    assert field.poly_eval([2, 3, 1], x) == 6


@given(st.lists(st.integers(0, 16), min_size=1, max_size=8), st.integers(0, 16))
def test_poly_eval_edge_cases(coeffs, x):
    assert field.poly_eval(coeffs, GF17(0)) == coeffs[0]
    assert field.poly_eval([0] * len(coeffs), GF17(x)) == 0
    assert field.poly_eval(coeffs, GF17(x)) == sum(c * x ** k for k, c in enumerate(coeffs)) % 17


def test_interpolate_identity_polynomial():
    pts = [(GF7(x), GF7(x)) for x in (1, 2, 3)]
    assert [int(c) for c in field.lagrange_interpolate(pts)] == [0, 1, 0]


def test_interpolate_random_degree_five():
    rng = np.random.default_rng(5)
    coeffs = [int(c) for c in rng.integers(0, 17, size=6)]
    pts = [(GF17(x), field.poly_eval(coeffs, GF17(x))) for x in (1, 2, 5, 7, 11, 16)]
    assert [int(c) for c in field.lagrange_interpolate(pts)] == coeffs


def test_interpolation_at_roots_matches_inverse_transform():
    root = root16()
    rng = np.random.default_rng(6)
    a = rng.integers(0, 17, size=16)
    values = field.ffft(a, root)
    pts = [(GF17(root.power(j)), GF17(int(values[j]))) for j in range(16)]
    assert [int(c) for c in field.lagrange_interpolate(pts)] == [int(x) for x in field.ffft_inverse(values, root)]


def test_duplicate_points_rejected():
    with pytest.raises(DuplicatePoint):
        field.lagrange_interpolate([(GF7(1), GF7(2)), (GF7(1), GF7(3))])
