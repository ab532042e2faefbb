import pytest
from hypothesis import given, strategies as st

from hybridlink.kernel import CommandSyntaxError, parse_command, pretty_print
from hybridlink.kernel.parser import (
    Assign,
    Call,
    CellIndex,
    ColIndex,
    Command,
    ExprStatement,
    Ident,
    MultiAssign,
    Number,
    PlotDirective,
    RowIndex,
    String,
)

FIGURE_COMMANDS = [
    "x=data(:,1)",
    "m=mean(x)",
    "[ret, cov] = ewstats(retseries)",
    "[risk, ror, weights] = portopt(ret, cov, 20)",
    "portopt(ret, cov, 20); grid on; xlabel(Labels{1}); ylabel(Labels{2})",
]


def test_column_index():
    assert parse_command("x=data(:,1)") == Command((Assign("x", ColIndex(Ident("data"), 1)),))


def test_multi_assign():
    cmd = parse_command("[ret, cov] = ewstats(retseries)")
    assert cmd.statements == (MultiAssign(("ret", "cov"), Call("ewstats", (Ident("retseries"),))),)


def test_call_assign():
    assert parse_command("m=mean(x)").statements == (Assign("m", Call("mean", (Ident("x"),))),)


def test_plot_sequence():
    cmd = parse_command("portopt(ret, cov, 20); grid on; xlabel(Labels{1}); ylabel(Labels{2})")
    assert cmd.statements == (
        ExprStatement(Call("portopt", (Ident("ret"), Ident("cov"), Number(20.0)))),
        PlotDirective("grid", "on"),
        PlotDirective("xlabel", CellIndex(Ident("Labels"), 1)),
        PlotDirective("ylabel", CellIndex(Ident("Labels"), 2)),
    )


def test_row_index_and_strings():
    cmd = parse_command("r = data(3,:); title('it''s'); s = \"two\"")
    assert cmd.statements == (
        Assign("r", RowIndex(Ident("data"), 3)),
        PlotDirective("title", String("it's")),
        Assign("s", String("two")),
    )


@pytest.mark.parametrize("text, pos", [
    ("x = ", 4),
    ("x = mean(y", 10),
    ("x = 'abc", 4),
    ("x = data(:,0)", 11),
    ("x = data(:,1.5)", 11),
    ("[a, b] = c", 9),
    ("x = y z", 6),
    ("x = y + 1", 6),
    ("grid maybe", 5),
])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(CommandSyntaxError) as info:
        parse_command(text)
    assert info.value.pos == pos


def test_empty_command():
    with pytest.raises(CommandSyntaxError):
        parse_command("   ")


@pytest.mark.parametrize("text", FIGURE_COMMANDS)
def test_figure_commands_round_trip(text):
    cmd = parse_command(text)
    assert parse_command(pretty_print(cmd)) == cmd


# -- generated ASTs -----------------------------------------------------------

RESERVED = {"grid", "xlabel", "ylabel", "title", "on", "off"}
idents = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,5}", fullmatch=True).filter(lambda s: s not in RESERVED)
indices = st.integers(1, 500)
numbers = st.floats(allow_nan=False, allow_infinity=False, width=64).map(lambda v: v + 0.0)
strings = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\n"), max_size=8)


def exprs():
    leaves = st.one_of(
        idents.map(Ident),
        numbers.map(Number),
        strings.map(String),
        st.builds(ColIndex, idents.map(Ident), indices),
        st.builds(RowIndex, idents.map(Ident), indices),
        st.builds(CellIndex, idents.map(Ident), indices),
    )
    return st.recursive(
        leaves,
        lambda children: st.builds(Call, idents, st.lists(children, max_size=3).map(tuple)),
        max_leaves=8,
    )


calls = st.builds(Call, idents, st.lists(exprs(), max_size=3).map(tuple))
statements = st.one_of(
    st.builds(Assign, idents, exprs()),
    st.builds(MultiAssign, st.lists(idents, min_size=1, max_size=3).map(tuple), calls),
    st.builds(ExprStatement, exprs()),
    st.sampled_from(["on", "off"]).map(lambda a: PlotDirective("grid", a)),
    st.builds(PlotDirective, st.sampled_from(["xlabel", "ylabel", "title"]), exprs()),
)
commands = st.lists(statements, min_size=1, max_size=4).map(lambda s: Command(tuple(s)))


@given(commands)
def test_generated_round_trip(cmd):
    assert parse_command(pretty_print(cmd)) == cmd
