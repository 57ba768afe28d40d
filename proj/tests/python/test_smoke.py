import math

import numpy as np
import pytest

import clonelab


def test_wrap_and_arc():
    assert clonelab.wrap_angle(2.0 * math.pi) == pytest.approx(0.0, abs=1e-15)
    assert clonelab.wrap_angle(-math.pi / 2.0) == pytest.approx(3.0 * math.pi / 2.0)
    assert clonelab.arc_delta(0.0, 3.0 * math.pi / 2.0) == pytest.approx(-math.pi / 2.0)


def test_chart_distance():
    cyl = clonelab.PhaseSpace.cylinder()
    a = clonelab.make_point(cyl, [0.0, 0.0])
    b = clonelab.make_point(cyl, [3.0 * math.pi / 2.0, 0.0])
    assert clonelab.chart_distance(cyl, a, b) == pytest.approx(math.pi / 2.0)


def test_lorentz_frame_and_cloning():
    frame = clonelab.complete_lorentz_frame(1)
    expected = np.array([[1.0, 1.0, 1.0], [1.0, -0.5, 0.5], [1.0, 0.5, 1.5]])
    assert np.max(np.abs(frame.mc - expected)) < 1e-12
    assert clonelab.eta_residual(frame.mc) < 1e-12

    x = np.array([1.0, 2.0])
    out = clonelab.apply_clone_map(frame, x, np.zeros(2), np.zeros(2))
    assert np.max(np.abs(out[0] - x)) < 1e-12
    assert np.max(np.abs(out[1] - x)) < 1e-12


def test_winding_number():
    angles = [2.0 * math.pi * k / 32.0 for k in range(32)]
    assert clonelab.winding_number(angles) == 1
    assert clonelab.winding_number([0.25] * 16) == 0


def test_quantum_clone():
    res = clonelab.clone_1d_subspace(np.array([1.0 + 0j, 0.0 + 0j]), np.array([2.0 + 0j, 0.0 + 0j]))
    assert res.c == pytest.approx(2.0)
    assert res.residual < 1e-12
    with pytest.raises(ValueError):
        clonelab.clone_1d_subspace(np.array([1.0 + 0j, 0.0 + 0j]), np.array([0.0 + 0j, 1.0 + 0j]))


def test_certificate_obstructs_identity():
    cyl = clonelab.PhaseSpace.cylinder()
    machine = clonelab.PhaseSpace.cylinder(-1)
    setup = clonelab.CloneSetup(
        cyl,
        machine,
        clonelab.make_point(cyl, [0.0, 0.0]),
        clonelab.make_point(machine, [0.0, 0.0]),
    )
    slot = clonelab.LoopSlot()
    slot.winding = 1
    shape = clonelab.LoopShape()
    shape.slots = [slot, clonelab.LoopSlot()]
    probe = clonelab.make_loop(cyl, shape, 64)
    cert = clonelab.no_go_certificate(setup, probe, 1e-2, "identity")
    assert cert.verdict == clonelab.Verdict.OBSTRUCTED
    assert list(cert.transported_windings) == [1, 0, 0]
    assert list(cert.required_windings)[:2] == [1, 1]
