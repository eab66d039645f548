import numpy as np
import pytest

from srbctl.robot_model import (ModelFormatError, ModelValidationError,
                                ToyBipedParams, load_model, randomize_model,
                                save_model, toy_biped_ik, toy_biped_model,
                                toy_biped_snapshot)


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "toy.model"
    save_model(toy_biped_model(), path)
    return path


def test_load_round_trip(model_file, tmp_path):
    model = load_model(model_file)
    assert model.m == 30.0
    assert model.n == 10
    assert [c.label for c in model.contacts] == ["left_foot", "right_foot"]

    out = tmp_path / "again.model"
    save_model(model, out)
    again = load_model(out)
    assert again.m == model.m
    assert np.array_equal(again.inertia, model.inertia)
    assert np.array_equal(again.tau_limit, model.tau_limit)
    assert again.contacts == model.contacts
    assert again.toy == model.toy


def test_zero_torque_limit_rejected(model_file, tmp_path):
    text = model_file.read_text().replace(
        "torque_limit = [60, 60", "torque_limit = [0, 60")
    bad = tmp_path / "bad.model"
    bad.write_text(text)
    with pytest.raises(ModelValidationError, match="tau_limit"):
        load_model(bad)


def test_missing_file():
    with pytest.raises(OSError):
        load_model("/nonexistent/nope.model")


def test_unknown_key_rejected(model_file, tmp_path):
    bad = tmp_path / "bad.model"
    bad.write_text(model_file.read_text() + "\nbogus = 1\n")
    with pytest.raises(ModelFormatError, match="bogus"):
        load_model(bad)


def test_parse_error_has_context(tmp_path):
    bad = tmp_path / "bad.model"
    bad.write_text("mass = = 3\n")
    with pytest.raises(ModelFormatError):
        load_model(bad)


def _stance_q(alpha=0.3):
    q = np.zeros(10)
    q[0] = q[5] = alpha
    q[1] = q[6] = -2 * alpha
    return q


def test_symmetric_stance_mirrors():
    params = ToyBipedParams()
    snap = toy_biped_snapshot(params, _stance_q(), np.zeros(10))
    left, right = snap.r
    assert left[0] == pytest.approx(right[0])
    assert left[2] == pytest.approx(right[2])
    assert left[1] == pytest.approx(-right[1])


def test_zero_velocity_gives_pure_gravity_bias():
    params = ToyBipedParams()
    q = _stance_q(0.4)
    snap = toy_biped_snapshot(params, q, np.zeros(10))
    l1, l2 = params.thigh_len, params.shank_len
    m1, m2 = params.thigh_mass, params.shank_mass
    g = params.grav
    want_hip = (m1 * 0.5 * l1 + m2 * l1) * g * np.sin(0.4) \
        + m2 * 0.5 * l2 * g * np.sin(0.4 - 0.8)
    assert snap.h_act[0] == pytest.approx(want_hip)
    assert snap.h_act[1] == pytest.approx(m2 * 0.5 * l2 * g * np.sin(-0.4))
    # torso rows mocked fixed
    assert np.all(snap.h_act[2:5] == 0)


def _fd_jacobian(params, q, side, h=1e-6):
    """Central-difference foot pose Jacobian (position + y-axis rotation),
    independent of the analytic path."""
    jac = np.zeros((10, 3))
    for j in range(10):
        qp, qm = q.copy(), q.copy()
        qp[j] += h
        qm[j] -= h
        sp = toy_biped_snapshot(params, qp, np.zeros(10))
        sm = toy_biped_snapshot(params, qm, np.zeros(10))
        jac[j, 0:3] = (sp.r[side] - sm.r[side]) / (2 * h)
    return jac


def test_jacobian_matches_finite_differences():
    params = ToyBipedParams()
    rng = np.random.default_rng(7)
    for _ in range(100):
        q = rng.uniform(-1.0, 1.0, 10)
        snap = toy_biped_snapshot(params, q, np.zeros(10))
        for side, joints in ((0, (0, 1)), (1, (5, 6))):
            fd = _fd_jacobian(params, q, side)
            got = snap.j_act[side, :, 0:3]
            scale = max(1.0, np.abs(fd).max())
            assert np.abs(got - fd).max() / scale < 1e-5
            # angular rows: unit rotation about +y per leg joint
            for j in joints:
                assert np.array_equal(snap.j_act[side, j, 3:6], [0.0, 1.0, 0.0])


def test_near_singular_flag():
    params = ToyBipedParams()
    q = np.zeros(10)  # knees fully extended
    snap = toy_biped_snapshot(params, q, np.zeros(10))
    assert snap.near_singular
    assert not toy_biped_snapshot(params, _stance_q(), np.zeros(10)).near_singular


def test_ik_places_foot_under_hip():
    params = ToyBipedParams()
    hip, knee = toy_biped_ik(params, 0.42)
    q = np.zeros(10)
    q[0], q[1] = hip, knee
    q[5], q[6] = hip, knee
    snap = toy_biped_snapshot(params, q, np.zeros(10))
    assert snap.r[0][0] == pytest.approx(0.0, abs=1e-12)
    assert snap.r[0][2] == pytest.approx(-0.42)


def test_randomize_deterministic():
    model = toy_biped_model()
    snap = toy_biped_snapshot(model.toy, _stance_q(), np.zeros(10))
    m1, s1 = randomize_model(model, snap, seed=123)
    m2, s2 = randomize_model(model, snap, seed=123)
    assert m1.m == m2.m
    assert np.array_equal(m1.inertia, m2.inertia)
    assert np.array_equal(s1.r, s2.r)
    assert np.array_equal(s1.j_act, s2.j_act)


def test_randomize_bounds():
    model = toy_biped_model()
    snap = toy_biped_snapshot(model.toy, _stance_q(), np.zeros(10))
    m_ratios, r_deltas = [], []
    for seed in range(10_000):
        rm, rs = randomize_model(model, snap, seed)
        m_ratios.append(rm.m / model.m)
        r_deltas.append(np.abs(rs.r - snap.r).max())
        # scaled inertia stays positive definite
        assert np.linalg.eigvalsh(rm.inertia).min() > 0
    m_ratios = np.array(m_ratios)
    assert m_ratios.min() >= 0.98 and m_ratios.max() <= 1.02
    assert max(r_deltas) <= 0.02
    # the draws actually spread over the range
    assert m_ratios.max() - m_ratios.min() > 0.035
