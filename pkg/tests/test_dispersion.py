import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlel.asymptotics import homogeneous_speed
from nlel.core import MaterialParams
from nlel.dispersion import (
    KernelBranch,
    dispersion_point,
    dispersion_speed,
    read_csv,
    sample_curve,
    surface_mode,
    write_csv,
)
from nlel.exceptions import InvalidParameter, OutOfBranch


def test_speed_examples():
    assert dispersion_speed(0.0) == 1.0
    assert dispersion_speed(0.0, "gaussian") == 1.0
    assert abs(dispersion_speed(1.0) - 0.8660254037844386) <= 1e-14
    assert abs(dispersion_speed(1.0, KernelBranch.GAUSSIAN) - 0.9593865375614005) <= 1e-14


def test_branch_edges():
    assert KernelBranch.EXPONENTIAL.K_max == 2.0
    assert KernelBranch.GAUSSIAN.K_max == pytest.approx(2 * math.sqrt(math.pi), rel=1e-15)
    assert dispersion_speed(2.0) == 0.0
    with pytest.raises(OutOfBranch):
        dispersion_speed(2.0001)
    dispersion_speed(3.0, "gaussian")
    with pytest.raises(InvalidParameter):
        dispersion_speed(-0.1)
    with pytest.raises(InvalidParameter):
        KernelBranch.parse("cauchy")


def test_sample_curve_examples():
    pts = sample_curve("exponential", 0.0, 1.9, 20)
    assert len(pts) == 20 and pts[0].C == 1.0 and pts[-1].K == 1.9
    assert np.all(np.diff([p.C for p in pts]) < 0)
    with pytest.raises(InvalidParameter):
        sample_curve("exponential", 0.0, 0.0, 2)
    with pytest.raises(InvalidParameter):
        sample_curve("exponential", 0.0, 1.0, 1)
    with pytest.raises(OutOfBranch):
        sample_curve("exponential", 0.0, 2.5, 10)


def test_branch_ordering():
    for K in np.linspace(0.01, 1.9, 40):
        assert dispersion_speed(float(K)) < dispersion_speed(float(K), "gaussian")


@given(K=st.floats(0.0, 2.0), branch=st.sampled_from(list(KernelBranch)))
def test_point_identities(K, branch):
    p = dispersion_point(K, branch)
    assert 0 <= p.C <= 1 and p.gamma >= 0
    assert abs(p.gamma**2 + p.C**2 - 1) <= 1e-14
    assert abs(p.C**2 + branch.coefficient * K**2 - 1) <= 1e-14


@given(K=st.floats(0.05, 1.95))
def test_cross_module_root(K):
    assert abs(homogeneous_speed(K) - dispersion_speed(K)) <= 1e-10


@pytest.mark.parametrize("branch", list(KernelBranch))
def test_surface_mode_residuals(branch):
    m = MaterialParams(2.0, 0.5, 0.3)
    mode = surface_mode(3.0, m, branch)
    assert abs(mode.eom_residual()) <= 1e-12 * mode.natural_scale
    assert abs(mode.bc_residual()) <= 1e-12 * mode.natural_scale
    assert mode.c == pytest.approx(mode.C * m.c2)
    assert mode.decaying
    detuned = surface_mode(3.0, m, branch, speed=1.01 * mode.C)
    assert abs(detuned.bc_residual()) > 1e-6 * detuned.natural_scale


def test_local_theory_has_no_surface_wave():
    mode = surface_mode(2.0, MaterialParams(1.0, 1.0, 0.0))
    assert mode.C == 1.0 and mode.gamma == 0.0 and not mode.decaying
    assert mode.bc_residual() == 0


def test_surface_mode_rejects_out_of_branch():
    with pytest.raises(OutOfBranch):
        surface_mode(30.0, MaterialParams(1.0, 1.0, 0.1))


def test_csv_round_trip():
    pts = sample_curve("gaussian", 0.0, 1.5, 7)
    buf = io.StringIO()
    write_csv(pts, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "K,C,gamma,branch"
    assert text.splitlines()[1] == "0,1,0,gaussian"
    assert read_csv(io.StringIO(text)) == pts
