import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from strawnet import (
    EvidenceError,
    RoleError,
    StrawConflictDetector,
    StructuralError,
    conflict_report,
    serialize_network,
)

ROWS = [
    {"Palpation": "yes", "Diabetes": "yes"},
    {"Palpation": "yes", "X-ray": "yes", "Diabetes": "yes"},
    {"Palpation": "no"},
]


def test_params_and_clone():
    det = StrawConflictDetector(kind="independent", threshold=0.5)
    assert det.get_params() == {"kind": "independent", "threshold": 0.5, "target_cap": 4096}
    twin = clone(det)
    assert twin.get_params() == det.get_params()
    det.set_params(kind="bipartite")
    assert det.kind == "bipartite"


def test_unfitted():
    with pytest.raises(NotFittedError):
        StrawConflictDetector().predict(ROWS)


def test_fit_sets_attributes(cancer):
    det = StrawConflictDetector().fit(cancer)
    assert det.n_features_in_ == 3
    assert list(det.feature_names_in_) == ["X-ray", "Palpation", "Diabetes"]
    assert det.straw_.name == "cancer-bipartite"


def test_fit_from_path(cancer, tmp_path):
    path = tmp_path / "c.net"
    path.write_text(serialize_network(cancer))
    det = StrawConflictDetector().fit(str(path))
    assert det.network_ == cancer


def test_fit_rejects_invalid(cancer):
    bad = cancer.replace_cpts([cancer.cpts[0].__class__("Gender", (), ((0.5, 0.6),))] + list(cancer.cpts[1:]))
    with pytest.raises(StructuralError):
        StrawConflictDetector().fit(bad)
    with pytest.raises(TypeError):
        StrawConflictDetector().fit(42)


@pytest.mark.parametrize("kind, expected", [("bipartite", [1, 1, 0]), ("independent", [1, 0, 0])])
def test_predict_matches_conflict_report(cancer, kind, expected):
    det = StrawConflictDetector(kind=kind).fit(cancer)
    assert det.predict(ROWS).tolist() == expected
    scores = det.score_samples(ROWS)
    for row, s in zip(ROWS, scores):
        assert s == pytest.approx(conflict_report(cancer, row, [kind]).index[kind], abs=1e-12)
    np.testing.assert_allclose(det.decision_function(ROWS), scores)


def test_threshold_shifts_decision(cancer):
    det = StrawConflictDetector(threshold=0.48).fit(cancer)
    # bipartite indices are about 0.458 and 0.505
    assert det.predict(ROWS[:2]).tolist() == [0, 1]


def test_array_input(cancer):
    det = StrawConflictDetector().fit(cancer)
    X = np.array([[None, "yes", "yes"], ["yes", "yes", "yes"], [None, "no", ""]], dtype=object)
    np.testing.assert_allclose(det.score_samples(X), det.score_samples(ROWS))
    with pytest.raises(ValueError):
        det.predict(np.array([["yes", "yes"]]))


def test_dataframe_input(cancer):
    pd = pytest.importorskip("pandas")
    det = StrawConflictDetector().fit(cancer)
    df = pd.DataFrame(ROWS)
    np.testing.assert_allclose(det.score_samples(df), det.score_samples(ROWS))


def test_transform_columns(cancer):
    det = StrawConflictDetector().fit(cancer)
    out = det.transform(ROWS)
    assert out.shape == (3, 3)
    assert out[0, 0] == pytest.approx(0.0452, abs=5e-4)
    assert out[0, 1] == pytest.approx(0.0619, abs=5e-4)
    np.testing.assert_allclose(out[:, 2], np.log2(out[:, 1] / out[:, 0]), atol=1e-12)


def test_bad_rows(cancer):
    det = StrawConflictDetector().fit(cancer)
    with pytest.raises(RoleError):
        det.predict([{"Gender": "male"}])
    with pytest.raises(EvidenceError, match="row 1"):
        det.predict([{"Palpation": "yes"}, {}])
    with pytest.raises(TypeError):
        det.predict({"Palpation": "yes"})
    assert det.predict([]).shape == (0,)
