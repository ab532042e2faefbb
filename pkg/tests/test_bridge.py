from pathlib import Path

import numpy as np
import pytest

from hybridlink.bridge import (
    EVAL_ERROR,
    OK,
    PARSE_ERROR,
    REF_ERROR,
    STATE_ERROR,
    TYPE_ERROR,
    BridgeError,
    LinkConfig,
    ScriptSyntaxError,
    State,
    matlabinit,
    parse_statement,
)
from hybridlink.values import StringList
from hybridlink.workbook import Workbook

from oracles import FIG6


def synthetic_workbook(seed=0):
    """Figure 4/5 layout: two columns of 1000 data rows at A4:B1003."""
    rng = np.random.default_rng(seed)
    wb = Workbook()
    wb["A3"], wb["B3"] = "X", "Y"
    wb.write_matrix("A4", rng.integers(0, 6, size=(1000, 2)).astype(float))
    return wb


@pytest.fixture
def s5(fixed_clock):
    return matlabinit(LinkConfig(session_id="s5", clock=fixed_clock), synthetic_workbook())


def test_init(session):
    assert session.state is State.RUNNING
    assert len(session.workspace) == 0
    assert [r.op for r in session.audit.records] == ["matlabinit"]
    assert session.audit.records[0].seq == 1


def test_two_inits_independent(fig6_workbook):
    a = matlabinit(LinkConfig(), fig6_workbook)
    b = matlabinit(LinkConfig(), fig6_workbook)
    assert a.session_id != b.session_id
    assert a.audit.head != b.audit.head


def test_close_open(session):
    assert session.ml_put_matrix("retseries", "B4:D9").code == OK
    assert session.ml_close().code == OK
    assert session.ml_put_matrix("retseries", "B4:D9").code == STATE_ERROR
    assert session.ml_close().code == STATE_ERROR
    assert session.ml_open().code == OK
    with pytest.raises(BridgeError) as info:
        session.ml_get_var("retseries")
    assert info.value.status.code == REF_ERROR
    assert session.ml_open().code == STATE_ERROR
    assert session.workbook["B4"] == 0.07125


def test_put_matrix(session):
    assert session.ml_put_matrix("retseries", "B4:D9").code == OK
    np.testing.assert_array_equal(session.workspace["retseries"], FIG6)
    assert session.ml_put_matrix("Labels", "F3:G3").code == OK
    assert session.workspace["Labels"] == StringList(["Risk", "ROR"])
    before = session.workspace.digest()
    assert session.ml_put_matrix("retseries", "B4:D9").code == OK
    assert session.workspace.digest() == before


def test_put_matrix_errors(session):
    assert session.ml_put_matrix("x", "A3:B4").code == TYPE_ERROR
    assert session.ml_put_matrix("x", "E4:E5").code == TYPE_ERROR
    assert session.ml_put_matrix("x", "B0").code == REF_ERROR
    assert session.ml_put_matrix("1x", "B4").code == EVAL_ERROR


def test_append(session):
    assert session.ml_append_matrix("r", "B4:D9").code == OK
    np.testing.assert_array_equal(session.workspace["r"], FIG6)
    assert session.ml_append_matrix("r", "B4:D5").code == OK
    np.testing.assert_array_equal(session.workspace["r"], np.vstack([FIG6, FIG6[:2]]))
    assert session.workspace["r"].shape == (8, 3)
    assert session.ml_append_matrix("r", "B4:C5").code == TYPE_ERROR
    assert session.workspace["r"].shape == (8, 3)


def test_delete(session):
    session.ml_put_matrix("r", "B4:D9")
    first = session.workspace.digest()
    assert session.ml_delete_matrix("r").code == OK
    with pytest.raises(BridgeError):
        session.ml_get_var("r")
    assert session.ml_delete_matrix("r").code != OK
    session.ml_put_matrix("r", "B4:D9")
    assert session.workspace.digest() == first


def test_eval_string(s5):
    s5.ml_put_matrix("data", "A4:B1003")
    assert s5.ml_eval_string("x=data(:,1)").code == OK
    assert s5.workspace["x"].shape == (1000, 1)
    before = s5.workspace.digest()
    assert s5.ml_eval_string("nosuch(x)").code == EVAL_ERROR
    assert s5.ml_eval_string("x = (").code == PARSE_ERROR
    assert s5.workspace.digest() == before


def test_portopt_bindings(session):
    session.ml_put_matrix("retseries", "B4:D9")
    session.ml_eval_string("[ret, cov] = ewstats(retseries)")
    assert session.ml_eval_string("[risk, ror, weights] = portopt(ret, cov, 20)").code == OK
    for name in ("risk", "ror", "weights"):
        assert name in session.workspace


def test_get_matrix(session):
    session.ml_put_matrix("retseries", "B4:D9")
    session.ml_put_matrix("Labels", "F3:G3")
    session.ml_eval_string("[ret, cov] = ewstats(retseries); [risk, ror, weights] = portopt(ret, cov, 20)")
    assert session.ml_get_matrix("risk", "F4").code == OK
    assert session.ml_get_matrix("weights", "H4").code == OK
    np.testing.assert_array_equal(session.workbook.read_range("F4:F23"), session.workspace["risk"])
    np.testing.assert_array_equal(session.workbook.read_range("H4:J23"), session.workspace["weights"])
    assert session.audit.records[-1].output_destination == ["H4:J23"]
    before = session.workbook.digest()
    assert session.ml_get_matrix("Labels", "K1").code == TYPE_ERROR
    assert session.ml_get_matrix("nosuch", "K1").code == REF_ERROR
    assert session.workbook.digest() == before


def test_put_get_var(session):
    m = np.array([[1.5, -2.0], [3.25, 1e-300]])
    assert session.ml_put_var("m", m).code == OK
    back = session.ml_get_var("m")
    assert back.tobytes() == m.tobytes()
    assert session.ml_put_var("s", "text").code == OK
    assert session.ml_get_var("s") == StringList(["text"])
    assert session.ml_put_var("bad", np.array([np.nan])).code == TYPE_ERROR
    with pytest.raises(BridgeError):
        session.ml_get_var("nope")


def test_put_var_matches_grid_path(session):
    session.ml_put_var("a", FIG6)
    session.ml_put_matrix("b", "B4:D9")
    assert session.audit.records[-1].value_digest == session.audit.records[-2].value_digest
    session.ml_get_matrix("a", "M1")
    session.ml_get_matrix("b", "Q1")
    assert session.workbook.read_range("M1:O6").tobytes() == session.workbook.read_range("Q1:S6").tobytes()


def test_matlabfcn(session):
    wb = session.workbook
    wb["L1"], wb["L2"], wb["L3"] = 1.0, 2.0, 3.0
    assert session.matlabfcn("mean", "L1:L3").tolist() == [[2.0]]
    with pytest.raises(BridgeError) as info:
        session.matlabfcn("nosuch", "L1:L3")
    assert info.value.status.code == EVAL_ERROR


def test_matlabfcn_cov(s5):
    c = s5.matlabfcn("cov", "A4:B1003")
    assert c.shape == (2, 2)
    assert c[0, 1] == c[1, 0]


def test_matlabsub(s5):
    assert s5.matlabsub("mean", "E6", "A4:A1003").code == OK
    data = s5.workbook.read_range("A4:A1003")
    assert s5.workbook["E6"] == pytest.approx(data.mean(), abs=1e-15)
    assert s5.matlabsub("cov", "J8", "A4:B1003").code == OK
    assert s5.workbook.read_range("J8:K9").shape == (2, 2)
    assert s5.workbook["L8"] is None and s5.workbook["J10"] is None
    s5.workbook["Z1"] = 7.0
    s5.matlabsub("mean", "E6", "Z1")
    assert s5.workbook["E6"] == 7.0


def test_figure5_consistency(s5):
    """var(Y) equals cov(2,2); the printed numbers themselves need the unprinted data."""
    s5.matlabsub("cov", "J8", "A4:B1003")
    s5.ml_put_matrix("data", "A4:B1003")
    s5.ml_eval_string("y=data(:,2); v=var(y)")
    v = s5.ml_get_var("v")[0, 0]
    assert v == s5.workbook["K9"]
    assert s5.workbook["J9"] == s5.workbook["K8"]


def test_dual_path_identity(session):
    session.ml_put_matrix("r", "B4:D9")
    session.ml_get_matrix("r", "L20")
    session.matlabsub("identity", "P20", "B4:D9")
    a = session.workbook.read_range("L20:N25")
    b = session.workbook.read_range("P20:R25")
    assert a.tobytes() == b.tobytes() == FIG6.tobytes()


def test_error_modes(session):
    res = session.ml_eval_string("x = (")
    assert res.code == PARSE_ERROR and res.detail == ""
    assert session.ml_show_matlab_errors(True).code == OK
    assert session.audit.records[-1].op == "ml_show_matlab_errors"
    res = session.ml_eval_string("x = (")
    assert res.code == PARSE_ERROR and "position" in res.detail


def test_full_errors_config(fig6_workbook):
    s = matlabinit(LinkConfig(full_errors=True), fig6_workbook)
    assert "undefined variable" in s.ml_get_matrix("nope", "A1").detail


def test_start_dir(session, tmp_path):
    assert session.resolve_path("plot").parent.resolve() == Path.cwd().resolve()
    assert session.ml_start_dir(str(tmp_path)).code == OK
    assert session.resolve_path("plot") == tmp_path / "plot"
    session.ml_close()
    assert session.ml_start_dir("/elsewhere").code == STATE_ERROR
    assert session.config.start_dir == str(tmp_path)


def test_use_full_desktop_and_auto_start(session):
    assert session.ml_use_full_desktop(True).code == OK
    assert session.ml_auto_start(False).code == OK
    assert session.config.use_full_desktop and not session.config.auto_start


def test_one_record_per_call(session):
    calls = [
        lambda: session.ml_put_matrix("r", "B4:D9"),
        lambda: session.ml_put_matrix("r", "ZZ0"),
        lambda: session.ml_eval_string("m = mean(r)"),
        lambda: session.ml_eval_string("m = mean("),
        lambda: session.ml_get_matrix("m", "L1"),
        lambda: session.ml_delete_matrix("gone"),
        lambda: session.execute('MLEvalString("v = var(r)")'),
        lambda: session.execute("Bogus(1)"),
    ]
    for i, call in enumerate(calls, start=2):
        call()
        assert len(session.audit.records) == i
    assert [r.seq for r in session.audit.records] == list(range(1, len(calls) + 2))


def test_failures_do_not_mutate(session):
    session.ml_put_matrix("r", "B4:D9")
    session.ml_put_matrix("Labels", "F3:G3")
    failing = [
        lambda: session.ml_put_matrix("x", "A3:B4"),
        lambda: session.ml_append_matrix("r", "B4:C4"),
        lambda: session.ml_eval_string("a = mean(r); b = nosuch(r)"),
        lambda: session.ml_get_matrix("Labels", "A1"),
        lambda: session.matlabsub("nosuch", "A1", "B4:D9"),
        lambda: session.matlabsub("mean", "A0", "B4:D9"),
        lambda: session.ml_get_figure("A1"),
        lambda: session.ml_delete_matrix("nope"),
    ]
    for call in failing:
        ws, wb = session.workspace.digest(), session.workbook.digest()
        assert call().code != OK
        assert session.workspace.digest() == ws
        assert session.workbook.digest() == wb
        assert session.audit.records[-1].status != OK


def test_get_figure(session):
    session.ml_put_matrix("retseries", "B4:D9")
    session.ml_eval_string("[ret, cov] = ewstats(retseries)")
    session.ml_eval_string("portopt(ret, cov, 5); grid on")
    assert session.plot.grid
    assert session.ml_get_figure("L1").code == OK
    assert session.workbook.read_range("L1:P5").shape == (5, 5)
    session.ml_eval_string("title('Frontier')")
    assert session.plot.title == "Frontier"


@pytest.mark.parametrize("text, op, args", [
    ('MLPutMatrix("retseries", B4:D9)', "ml_put_matrix", ["retseries", "B4:D9"]),
    ('0 <== MLPutMatrix("Labels", F3:G3)', "ml_put_matrix", ["Labels", "F3:G3"]),
    ('=MLEvalString("[ret, cov] = ewstats(retseries)")', "ml_eval_string",
     ["[ret, cov] = ewstats(retseries)"]),
    ("matlabsub(“mean”,“E6”,A4:A1003”)", "matlabsub", ["mean", "E6", "A4:A1003"]),
    ('matlabsub("cov","J8",A4:B1003)', "matlabsub", ["cov", "J8", "A4:B1003"]),
    ('MLGetMatrix("risk", "F4")', "ml_get_matrix", ["risk", "F4"]),
    ("MLShowMatlabErrors(TRUE)", "ml_show_matlab_errors", [True]),
    ("mlautostart(false)", "ml_auto_start", [False]),
    ("MLClose", "ml_close", []),
    ("MLOpen()", "ml_open", []),
    ('MLEvalString("title(""a,b"")")', "ml_eval_string", ['title("a,b")']),
])
def test_parse_statement(text, op, args):
    assert parse_statement(text) == (op, args)


@pytest.mark.parametrize("text", [
    "Bogus(1)", 'MLPutVar("x", 1)', 'MLPutMatrix("x")', 'MLPutMatrix("x", B4', "MLShowMatlabErrors(maybe)",
    'MLEvalString("open', 'MLPutMatrix("x",, B4)',
])
def test_parse_statement_errors(text):
    with pytest.raises(ScriptSyntaxError):
        parse_statement(text)


def test_execute_parse_failure_is_audited(session):
    res = session.execute("Bogus(1)")
    assert res.code == PARSE_ERROR
    rec = session.audit.records[-1]
    assert rec.op == "statement" and rec.status == PARSE_ERROR
