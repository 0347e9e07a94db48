import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from tetrademag.assembly import MU0, MagnetizedTetrahedron, b_field, tet_field
from tetrademag.estimator import TetrahedralField, check_points
from tetrademag.mesh import reference_mesh

from .conftest import REFERENCE_M, REFERENCE_THROUGH, REFERENCE_VERTICES


@pytest.fixture
def model():
    return TetrahedralField(REFERENCE_VERTICES * 1e3, [[0, 1, 2, 3]], [REFERENCE_M], unit="mm")


@pytest.fixture
def points(rng):
    return REFERENCE_THROUGH + rng.normal(size=(40, 3)) * 2e-3


def test_params_round_trip(model):
    params = model.get_params()
    assert set(params) == {"vertices", "elements", "magnetization", "unit", "output"}
    other = clone(model).set_params(output="B")
    assert other.output == "B" and model.output == "H"


def test_unfitted(model, points):
    with pytest.raises(NotFittedError):
        model.predict(points)


def test_predict_h_and_b(model, points, reference_tet):
    # vertices went through a mm -> m conversion, so allow rounding-level drift
    mt = MagnetizedTetrahedron(reference_tet, REFERENCE_M)
    H = tet_field(mt, points)
    np.testing.assert_allclose(model.fit().predict(points), H, rtol=0, atol=1e-12 * np.abs(H).max())
    B = clone(model).set_params(output="B").fit().predict(points)
    np.testing.assert_allclose(B, b_field(mt, points), rtol=0, atol=1e-12 * MU0 * np.abs(H).max())


def test_from_mesh(points):
    a = TetrahedralField.from_mesh(reference_mesh()).fit().predict(points)
    np.testing.assert_array_equal(a, reference_mesh().field(points))


def test_transform_contracts_to_field(model, points):
    model.fit()
    T = model.transform(points)
    assert T.shape == (len(points), 9)
    np.testing.assert_allclose(T.reshape(-1, 3, 3) @ REFERENCE_M, model.predict(points), rtol=1e-13, atol=1e-18)


def test_field_operator_multi_element(rng, points):
    v = np.vstack([REFERENCE_VERTICES, REFERENCE_VERTICES.mean(0)])
    elements = [[j for j in range(4) if j != i] + [4] for i in range(4)]
    M = rng.normal(size=(4, 3))
    model = TetrahedralField(v, elements, M).fit()
    op = model.field_operator(points)
    assert op.shape == (len(points), 3, 12)
    np.testing.assert_allclose(op @ M.ravel(), model.predict(points), rtol=1e-12, atol=1e-15)


def test_pipeline(model, points):
    # points supplied in millimetres, converted ahead of the model
    pipe = make_pipeline(FunctionTransformer(lambda X: X * 1e-3), model)
    pipe.fit(points * 1e3)
    np.testing.assert_allclose(pipe.predict(points * 1e3), model.predict(points), rtol=1e-12)


def test_bad_output(model):
    with pytest.raises(ValueError, match="output"):
        model.set_params(output="E").fit()


def test_check_points():
    assert check_points([[1, 2, 3]]).dtype == np.float64
    with pytest.raises(ValueError):
        check_points([[1, 2]])
    with pytest.raises(ValueError):
        check_points([[1, 2, np.inf]])


def test_mu0():
    assert MU0 == 4e-7 * np.pi
