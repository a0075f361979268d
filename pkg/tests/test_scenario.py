from __future__ import annotations

import copy
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from catchern.cochains import CyclicCochain
from catchern.homotopy import eval_path
from catchern.omega import chern_character
from catchern.samplers import proj_algebra, random_fredholm_module, split_idempotent_path
from catchern.scenario import (
    ScenarioError,
    cochain_from_json,
    cochain_to_json,
    dumps,
    fixture_path,
    load_cochain,
    load_scenario,
    parse_scenario,
    save_cochain,
    scenario_to_json,
)


def _proj_data():
    return json.loads(fixture_path("proj").read_text())


def test_fixtures_load():
    sc = load_scenario(fixture_path("proj"))
    assert sc.algebra.basis == ("e",) and sc.path is None
    assert np.array_equal(sc.module.rho[0].matrix, np.diag([1, 0]))
    assert len(sc.digest) == 64
    assert load_scenario(fixture_path("proj_path")).path is not None
    assert load_scenario(fixture_path("split_path")).path.fixed_f


def test_scenario_round_trip(rng):
    FM = random_fredholm_module(rng)
    sc = parse_scenario(json.loads(dumps(scenario_to_json(FM))))
    for a, b in zip(FM.rho, sc.module.rho):
        assert np.array_equal(a.matrix, b.matrix)
    assert np.array_equal(FM.f_op.matrix, sc.module.f_op.matrix)
    path = split_idempotent_path()
    FM0 = eval_path(path, 0.0)
    sc = parse_scenario(json.loads(dumps(scenario_to_json(FM0, path))))
    for t in (0.0, 0.3, 1.0):
        for a, b in zip(eval_path(path, t).rho, eval_path(sc.path, t).rho):
            assert np.array_equal(a.matrix, b.matrix)


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d["module"]["rho"]["e"]["1"].update(pp=[[1, 2]]), "$.module.rho.e.1.pp"),
        (lambda d: d["module"]["rho"].update(x={}), "$.module.rho"),
        (lambda d: d["module"]["F"].update(zz={}), "$.module.F"),
        (lambda d: d["algebra"].update(structure_constants=[[[1, 1]]]), "$.algebra.structure_constants"),
        (lambda d: d.pop("module"), "$"),
        (lambda d: d["module"].update(p="big"), "$.module.p"),
    ],
    ids=["rho-shape", "unknown-label", "unknown-simple", "constants-shape", "missing-module", "bad-p"],
)
def test_parse_errors_name_the_path(mutate, where):
    data = copy.deepcopy(_proj_data())
    mutate(data)
    with pytest.raises(ScenarioError) as info:
        parse_scenario(data)
    assert info.value.where.startswith(where)
    assert str(info.value).startswith(info.value.where)


def test_bad_json_file(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_scenario(f)


def test_cochain_round_trip_chern(tmp_path, rng):
    FM = random_fredholm_module(rng, max_algebra_dim=2)
    tau = chern_character(FM, 2)
    f = tmp_path / "tau.json"
    save_cochain(tau, f)
    back = load_cochain(f)
    assert back.degree == 2 and np.array_equal(back.tensor, tau.tensor)
    assert back.algebra.basis == FM.algebra.basis


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.float64, (1, 1, 1), elements=finite), arrays(np.float64, (1, 1, 1), elements=finite))
def test_cochain_round_trip_bit_exact(re, im):
    psi = CyclicCochain(proj_algebra(), 2, re + 1j * im)
    back = cochain_from_json(json.loads(dumps(cochain_to_json(psi))))
    assert back.tensor.tobytes() == psi.tensor.tobytes()
