"""Tests for the scikit-learn style wrapper layer."""

import numpy as np
import pytest
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from dicke_moments.bernstein import coherent_populations
from dicke_moments.dicke_core import dicke_populations, evolve_trajectory
from dicke_moments.estimators import (
    BernsteinMomentTransform,
    CoherentMixtureReconstructor,
    HankelSeparabilityClassifier,
)


def trajectory_rows(N, times):
    traj = evolve_trajectory(dicke_populations(N, N), times)
    return np.vstack([s.p for s in traj.states])


def test_moment_transform_round_trip():
    X = trajectory_rows(6, np.linspace(0.0, 4.0, 12))
    tf = BernsteinMomentTransform().fit(X)
    M = tf.transform(X)
    assert M.shape == X.shape
    np.testing.assert_allclose(M[:, 0], 1.0, atol=1e-10)
    np.testing.assert_allclose(tf.inverse_transform(M), X, atol=1e-9)


def test_moment_transform_requires_fit():
    with pytest.raises(NotFittedError):
        BernsteinMomentTransform().transform(np.eye(3))


def test_classifier_separates_trajectory_from_dicke_states():
    N = 8
    X_sep = trajectory_rows(N, np.linspace(0.0, 5.0, 10))
    X_ent = np.vstack([dicke_populations(N, k).p for k in range(1, N)])
    clf = HankelSeparabilityClassifier().fit(X_sep)
    assert np.all(clf.predict(X_sep) == 1)
    assert np.all(clf.predict(X_ent) == 0)
    scores = clf.decision_function(np.vstack([X_sep, X_ent]))
    assert np.all(scores[: len(X_sep)] == 0.0)
    assert np.all(scores[len(X_sep):] < 0.0)


def test_classifier_shape_check():
    clf = HankelSeparabilityClassifier().fit(np.eye(4))
    with pytest.raises(ValueError, match="Dicke levels"):
        clf.predict(np.eye(5))


def test_reconstructor_recovers_mixtures():
    rows = np.vstack(
        [
            coherent_populations(7, 0.25).p,
            0.5 * coherent_populations(7, 0.1).p
            + 0.5 * coherent_populations(7, 0.8).p,
        ]
    )
    rec = CoherentMixtureReconstructor().fit(rows)
    assert len(rec.decompositions_) == 2
    assert np.all(rec.residuals_ <= 1e-8)
    assert len(rec.decompositions_[0].atoms) == 1
    assert len(rec.decompositions_[1].atoms) == 2


def test_pipeline_composition():
    X = trajectory_rows(5, np.linspace(0.0, 3.0, 8))
    pipe = make_pipeline(HankelSeparabilityClassifier())
    assert np.all(pipe.fit(X).predict(X) == 1)


def test_get_params_round_trip():
    clf = HankelSeparabilityClassifier(tol_psd=1e-9)
    assert clf.get_params() == {"tol_psd": 1e-9}
    clf.set_params(tol_psd=1e-8)
    assert clf.tol_psd == 1e-8
