import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from lpvsim import (
    DimensionError,
    DomainError,
    LpvStateSpace,
    ParseError,
    PMatrixFunction,
    SchedulingDomain,
    eval_pmatrix,
    eval_pmatrix_many,
    parse_model,
    serialize_model,
    validate_point,
)

MINIMAL = json.dumps(
    {
        "nx": 1, "nu": 1, "ny": 1, "np": 1,
        "domain": {"lower": [-1.0], "upper": [1.0]},
        "A": [{"exponents": [1], "coeff": [[-1.0]]}],
    }
)


def test_eval_constant_term_ignores_p():
    f = PMatrixFunction.constant(np.eye(2), n_p=1)
    assert_array_equal(eval_pmatrix(f, [3.7]), np.eye(2))


def test_eval_affine_mass_spring_row():
    f = PMatrixFunction.affine([[0.0, 1.0], [0.0, 0.0]], [[[0.0, 0.0], [-1.0, 0.0]]])
    assert_array_equal(eval_pmatrix(f, [4.0]), [[0.0, 1.0], [-4.0, 0.0]])


def test_eval_monomials_two_params():
    # independent scalar oracle: 2^2 * 2 + (2*3) * 1 = 8 + 6 = 14
    f = PMatrixFunction(1, 1, (((2, 0), [[2.0]]), ((1, 1), [[1.0]])))
    assert_allclose(eval_pmatrix(f, [2.0, 3.0]), [[14.0]], rtol=0, atol=0)


def test_eval_zero_function_and_many():
    z = PMatrixFunction.zero(2, 3)
    assert_array_equal(eval_pmatrix(z, [1.0]), np.zeros((2, 3)))
    f = PMatrixFunction.affine([[1.0]], [[[2.0]], [[0.5]]])
    pts = np.array([[0.0, 0.0], [1.0, 2.0], [-1.0, 4.0]])
    stacked = eval_pmatrix_many(f, pts)
    expected = np.array([eval_pmatrix(f, p) for p in pts])
    assert_allclose(stacked, expected, rtol=0, atol=0)


def test_eval_wrong_p_length():
    f = PMatrixFunction.constant([[1.0]], n_p=2)
    with pytest.raises(DimensionError):
        eval_pmatrix(f, [1.0])


def test_scaling_is_exactly_linear():
    rng = np.random.default_rng(7)
    f = PMatrixFunction(
        2, 2,
        (((0, 0), rng.standard_normal((2, 2))),
         ((1, 0), rng.standard_normal((2, 2))),
         ((0, 2), rng.standard_normal((2, 2)))),
    )
    for alpha in (-3.0, 0.5, 2.0):
        p = rng.uniform(-2, 2, size=2)
        assert_allclose(
            eval_pmatrix(f.scaled(alpha), p),
            alpha * eval_pmatrix(f, p),
            rtol=1e-13, atol=1e-15,
        )


def test_term_order_shuffle_changes_nothing_beyond_roundoff():
    rng = np.random.default_rng(11)
    terms = [((i, j), rng.standard_normal((1, 1))) for i in range(3) for j in range(3)]
    f = PMatrixFunction(1, 1, tuple(terms))
    g = PMatrixFunction(1, 1, tuple(reversed(terms)))
    for _ in range(20):
        p = rng.uniform(-1.5, 1.5, size=2)
        assert abs(eval_pmatrix(f, p)[0, 0] - eval_pmatrix(g, p)[0, 0]) <= 1e-14


def test_duplicate_exponents_rejected_by_constructor():
    with pytest.raises(DimensionError):
        PMatrixFunction(1, 1, (((0,), [[1.0]]), ((0,), [[2.0]])))


def test_parse_minimal_model():
    m = parse_model(MINIMAL)
    assert (m.n_x, m.n_u, m.n_y, m.n_p) == (1, 1, 1, 1)
    assert_array_equal(eval_pmatrix(m.A, [0.25]), [[-0.25]])
    # omitted matrices are zero
    assert_array_equal(eval_pmatrix(m.B, [0.0]), [[0.0]])


def test_parse_rejects_wrong_coeff_shape():
    bad = json.dumps(
        {
            "nx": 2, "nu": 1, "ny": 1, "np": 1,
            "domain": {"lower": [0.0], "upper": [1.0]},
            "B": [{"exponents": [0], "coeff": [[1.0, 0.0], [0.0, 1.0]]}],
        }
    )
    with pytest.raises(DimensionError):
        parse_model(bad)


def test_parse_merges_duplicate_exponents():
    text = json.dumps(
        {
            "nx": 1, "nu": 1, "ny": 1, "np": 1,
            "domain": {"lower": [0.0], "upper": [1.0]},
            "A": [
                {"exponents": [0], "coeff": [[1.0]]},
                {"exponents": [0], "coeff": [[2.0]]},
            ],
        }
    )
    m = parse_model(text)
    assert_array_equal(eval_pmatrix(m.A, [0.5]), [[3.0]])
    assert len(m.A.terms) == 1


def test_parse_error_reports_position():
    with pytest.raises(ParseError, match="line"):
        parse_model('{"nx": 1,,}')


def test_parse_missing_and_unknown_fields():
    with pytest.raises(ParseError, match="missing"):
        parse_model(json.dumps({"nx": 1, "nu": 1, "ny": 1, "np": 1}))
    bad = json.loads(MINIMAL)
    bad["extra"] = 1
    with pytest.raises(ParseError, match="unknown"):
        parse_model(json.dumps(bad))


def test_parse_rejects_inverted_domain():
    bad = json.loads(MINIMAL)
    bad["domain"] = {"lower": [1.0], "upper": [-1.0]}
    with pytest.raises(DomainError):
        parse_model(json.dumps(bad))


def test_roundtrip_is_identity_on_canonical_form():
    text = json.dumps(
        {
            "nx": 2, "nu": 1, "ny": 2, "np": 2,
            "domain": {"lower": [0.5, -1.0], "upper": [4.0, 1.0]},
            "A": [
                {"exponents": [1, 0], "coeff": [[0.0, 0.0], [-1.0, 0.0]]},
                {"exponents": [0, 0], "coeff": [[0.0, 1.0], [0.0, -0.5]]},
                {"exponents": [0, 0], "coeff": [[0.0, 0.0], [0.0, -0.25]]},
            ],
            "B": [{"exponents": [0, 0], "coeff": [[0.0], [1.0]]}],
            "C": [{"exponents": [0, 1], "coeff": [[1.0, 0.0], [0.0, 1.0]]}],
        }
    )
    m1 = parse_model(text)
    s1 = serialize_model(m1)
    m2 = parse_model(s1)
    assert m1 == m2
    assert serialize_model(m2) == s1


def test_validate_point_closed_box():
    box = SchedulingDomain([-1.0], [1.0])
    assert validate_point(box, [0.0]) is True
    assert validate_point(box, [1.0]) is True  # boundary inclusive
    box2 = SchedulingDomain([-1.0, 0.0], [1.0, 2.0])
    assert validate_point(box2, [0.0, 2.5]) is False
    with pytest.raises(DimensionError):
        validate_point(box2, [0.0])


def test_domain_helpers():
    box = SchedulingDomain([0.0, 10.0], [1.0, 20.0])
    assert_array_equal(box.midpoint(), [0.5, 15.0])
    v = box.vertices()
    assert v.shape == (4, 2)
    assert_array_equal(v[0], [0.0, 10.0])
    assert_array_equal(v[-1], [1.0, 20.0])
    g = box.grid(3)
    assert g.shape == (9, 2)
    assert_array_equal(g[1], [0.0, 15.0])  # last dimension cycles fastest


def test_state_space_shape_validation():
    dom = SchedulingDomain([0.0], [1.0])
    A = PMatrixFunction.constant(np.zeros((2, 2)), 1)
    B = PMatrixFunction.constant(np.zeros((2, 1)), 1)
    C = PMatrixFunction.constant(np.zeros((1, 2)), 1)
    D = PMatrixFunction.constant(np.zeros((1, 1)), 1)
    m = LpvStateSpace(2, 1, 1, 1, A, B, C, D, dom)
    assert m.is_constant
    with pytest.raises(DimensionError):
        LpvStateSpace(2, 1, 1, 1, A, B, C, B, dom)  # D has B's shape
