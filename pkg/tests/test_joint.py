from types import SimpleNamespace

import numpy as np
import pytest

from iontrans.dynamics import amplitude_damping_channel, average_channel_fidelity, dephasing_channel, identity_channel
from iontrans.errors import CalibrationError, GeometryError, StepError
from iontrans.protocol import run_joint_protocol, schedule_durations


@pytest.fixture
def stub_steps(monkeypatch):
    """Replace the three steps by perfect transfers of known duration; returns the stubs for tweaking."""
    stubs = SimpleNamespace(
        step3=SimpleNamespace(channel=identity_channel(2), fidelity=1.0, channel_fidelity=1.0, duration=5e3),
        step2=SimpleNamespace(channel=identity_channel(2), fidelity=1.0, duration=2e4),
        step1=SimpleNamespace(fidelity=1.0, duration=12.0),
    )
    monkeypatch.setattr("iontrans.protocol.joint.prepare_chain", lambda inputs, params: SimpleNamespace(n_ions=2))
    monkeypatch.setattr("iontrans.protocol.joint.run_step3", lambda *args: stubs.step3)
    monkeypatch.setattr("iontrans.protocol.joint.run_step2", lambda *args: stubs.step2)
    monkeypatch.setattr("iontrans.protocol.joint.run_step1_retrieval", lambda *args: stubs.step1)
    return stubs


def test_perfect_steps_compose_to_a_perfect_transfer(params, two_ions, stub_steps):
    report = run_joint_protocol(params, two_ions)
    assert report.fidelity == pytest.approx(1.0)
    assert report.fidelity_product == 1.0
    assert report.composition_ok
    assert report.leakage == pytest.approx(0.0, abs=1e-15)


def test_retrieval_loss_damps_the_excitation(params, two_ions, stub_steps):
    stub_steps.step1.fidelity = 0.9
    report = run_joint_protocol(params, two_ions)
    assert report.fidelity == pytest.approx(((1 + np.sqrt(0.9)) ** 2 + 2) / 6)
    assert report.channel_fidelities["I"] == pytest.approx(average_channel_fidelity(amplitude_damping_channel(0.1)))
    assert report.step_fidelities == {"III": 1.0, "II": 1.0, "I": 0.9}
    assert report.composition_ok


def test_composition_is_no_better_than_its_worst_step(params, two_ions, stub_steps):
    stub_steps.step2.channel = dephasing_channel(0.3)
    stub_steps.step2.fidelity = average_channel_fidelity(dephasing_channel(0.3))
    stub_steps.step1.fidelity = 0.95
    report = run_joint_protocol(params, two_ions)
    assert report.composition_ok
    assert report.fidelity <= min(report.channel_fidelities.values()) + 1e-12
    assert report.fidelity_product == pytest.approx(0.95 * stub_steps.step2.fidelity)


def test_durations_are_reported_in_seconds(params, two_ions, stub_steps):
    report = run_joint_protocol(params, two_ions)
    omega = 2 * np.pi * params.trap_frequency_hz
    assert report.durations["III"] == pytest.approx(5e3 / omega)
    assert report.durations["II"] == pytest.approx(2e4 / omega)
    assert report.durations["I"] == pytest.approx(12.0 / (params.kappa_over_omega * omega))
    assert report.duration_phys == pytest.approx(sum(report.durations[step] for step in ("III", "II", "I")))
    assert report.durations == schedule_durations(params, stub_steps.step1, stub_steps.step2, stub_steps.step3)


def test_geometry_failures_are_tagged(monkeypatch, params, two_ions, stub_steps):
    def broken(inputs, params):
        raise GeometryError("no chain")

    monkeypatch.setattr("iontrans.protocol.joint.prepare_chain", broken)
    with pytest.raises(StepError) as info:
        run_joint_protocol(params, two_ions)
    assert info.value.step == "geometry"
    assert isinstance(info.value.cause, GeometryError)


def test_step_failures_are_tagged(monkeypatch, params, two_ions, stub_steps):
    def broken(*args):
        raise CalibrationError("edge of the interval")

    monkeypatch.setattr("iontrans.protocol.joint.run_step3", broken)
    with pytest.raises(StepError, match="step III: edge of the interval") as info:
        run_joint_protocol(params, two_ions)
    assert info.value.step == "III"


def test_unexpected_errors_are_not_wrapped(monkeypatch, params, two_ions, stub_steps):
    def broken(*args):
        raise ZeroDivisionError

    monkeypatch.setattr("iontrans.protocol.joint.run_step2", broken)
    with pytest.raises(ZeroDivisionError):
        run_joint_protocol(params, two_ions)


@pytest.mark.slow
def test_joint_run_on_a_short_chain(small_params, two_ions):
    report = run_joint_protocol(small_params, two_ions)
    assert 0.0 <= report.fidelity <= 1.0
    assert report.step1.n_ions == report.step2.n_ions == report.step3.n_ions == 2
    assert report.duration_phys > 0
