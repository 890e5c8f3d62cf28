import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from eirc_monitor.estimators import (
    ActivityLevelClassifier,
    GravityFilter,
    PostureClassifier,
    SMAWindower,
    TiltEstimator,
    make_activity_pipeline,
)
from eirc_monitor.pipeline import process_records
from eirc_monitor.posture import PostureTracker
from eirc_monitor.sensor_model import Channel
from eirc_monitor.synth import ActivityProfile, Bout, generate


@pytest.fixture(scope="module")
def session():
    profile = ActivityProfile(
        (Bout(30_000, 5.25, tilt_deg=10, noise=0.1), Bout(30_000, 27.0, tilt_deg=70, noise=0.3)), seed=2
    )
    return generate(profile)


def _columns(session, channel):
    return np.array([r.values for r in session.records if r.channel is channel])


def test_pipeline_matches_streaming_engine(session):
    X = _columns(session, Channel.ACCEL)
    pipe = make_activity_pipeline()
    labels = pipe.fit(X).predict(X)
    results, _ = process_records(session.records)
    assert list(labels) == [r.features.level.label for r in results]
    smas = pipe[:-1].transform(X)[:, 0]
    assert np.array_equal(smas, [r.features.sma for r in results])


def test_tilt_estimator_matches_tracker(session):
    acc = _columns(session, Channel.ACCEL)
    gyr = _columns(session, Channel.GYRO)
    mag = _columns(session, Channel.MAG)
    X = np.hstack([acc, gyr, mag])
    est = TiltEstimator().fit(X)
    tilts = est.transform(X)[:, 0]
    # the tracker warms up, the batch estimator does not; both settle on the same tilt
    tr = PostureTracker()
    for i, row in enumerate(acc):
        tr.set_gyro(gyr[i])
        last = tr.update(i * 200, row)
    assert tilts[-1] == pytest.approx(last.tilt_deg, abs=1.0)


def test_tilt_estimator_settles():
    profile = ActivityProfile((Bout(60_000, 5.25, tilt_deg=70, noise=0.1),), seed=3)
    session = generate(profile)
    X = np.hstack([_columns(session, Channel.ACCEL), _columns(session, Channel.GYRO)])
    tilts = TiltEstimator().fit(X).transform(X)
    assert tilts[-1, 0] == pytest.approx(70.0, abs=2.0)
    assert list(PostureClassifier().fit(tilts).predict(tilts[-1:])) == ["Lying"]


def test_energy_expenditure():
    clf = ActivityLevelClassifier().fit(np.zeros((1, 1)))
    assert clf.energy_expenditure(np.array([[0.986008]]))[0] == pytest.approx(6.784609, abs=1e-5)
    assert list(clf.predict(np.array([[1.5], [9.0], [18.0], [18.01]]))) == [
        "Sedentary",
        "Low",
        "Moderate",
        "Vigorous",
    ]


def test_params_and_clone():
    pipe = make_activity_pipeline(alpha=0.9)
    assert pipe.get_params()["gravity__alpha"] == 0.9
    pipe.set_params(level__bounds=(1.0, 8.0, 16.0))
    assert clone(pipe).get_params()["level__bounds"] == (1.0, 8.0, 16.0)


def test_not_fitted_and_shape_errors():
    with pytest.raises(NotFittedError):
        GravityFilter().transform(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        SMAWindower().fit(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        TiltEstimator().fit(np.zeros((3, 5)))
    with pytest.raises(ValueError):
        ActivityLevelClassifier(bounds=(9, 1.5, 18)).fit(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        PostureClassifier(thresholds=(20, 60, 190)).fit(np.zeros((1, 1)))
    clf = ActivityLevelClassifier().fit(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        clf.predict(np.array([[-1.0]]))
