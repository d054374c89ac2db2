from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dspipe.frontend import (
    AliasEnv,
    CellKind,
    MalformedNotebookError,
    ScriptSyntaxError,
    SourceUnit,
    UnitKind,
    ast_metrics,
    extract_calls,
    extract_headings,
    load_source,
    parse_notebook,
)


def script(text: str) -> SourceUnit:
    from dspipe.frontend import Cell

    return SourceUnit("t.py", UnitKind.SCRIPT, (Cell(0, CellKind.CODE, text),))


def notebook(*cells: tuple[str, str]) -> SourceUnit:
    doc = {"cells": [{"cell_type": k, "source": s} for k, s in cells], "nbformat": 4}
    return parse_notebook(json.dumps(doc), "nb.ipynb")


def resolved(unit: SourceUnit) -> list[str]:
    return [e.resolved_name for e in extract_calls(unit)]


# --- load_source ---------------------------------------------------------


def test_notebook_cells_in_order():
    unit = notebook(("markdown", "# Intro"), ("code", "x = 1"), ("code", "y = 2"))
    assert [c.index for c in unit.cells] == [0, 1, 2]
    assert [c.kind for c in unit.cells] == [CellKind.MARKDOWN, CellKind.CODE, CellKind.CODE]
    assert unit.cells[1].headings == ()


def test_script_is_one_cell(write):
    unit = load_source(write("train.py", "import os\n"))
    assert unit.kind is UnitKind.SCRIPT
    assert len(unit.cells) == 1 and unit.cells[0].index == 0


def test_source_arrays_concatenate_verbatim(write):
    doc = {"cells": [{"cell_type": "code", "source": ["a = f(1)\n", "b = g(a)"]}]}
    unit = load_source(write("nb.ipynb", json.dumps(doc)))
    assert unit.cells[0].text == "a = f(1)\nb = g(a)"


@pytest.mark.parametrize(
    "doc, where",
    [
        ({"cells": "not-a-list"}, "$.cells"),
        ({"nbformat": 4}, "$.cells"),
        ([], "$"),
        ({"cells": [{"cell_type": "code", "source": "x"}, {"source": "y"}]}, "$.cells[1].cell_type"),
        ({"cells": [{"cell_type": "code"}]}, "$.cells[0].source"),
        ({"cells": [{"cell_type": "code", "source": ["a", 3]}]}, "$.cells[0].source[1]"),
    ],
)
def test_malformed_notebook_cites_json_path(doc, where):
    with pytest.raises(MalformedNotebookError) as info:
        parse_notebook(json.dumps(doc), "bad.ipynb")
    assert info.value.json_path == where
    assert where in str(info.value)


def test_invalid_json():
    with pytest.raises(MalformedNotebookError):
        parse_notebook("{not json", "bad.ipynb")


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(OSError):
        load_source(tmp_path / "missing.py")


# --- extract_calls -------------------------------------------------------


def test_alias_substitution():
    assert resolved(script("import pandas as pd\npd.read_csv('a.csv')\n")) == ["pandas.read_csv"]


def test_random_forest_order():
    text = (
        "random_forest = RandomForestClassifier(n_estimators=100)\n"
        "random_forest.fit(train, train_labels)\n"
    )
    events = extract_calls(script(text))
    assert [e.method_name for e in events] == ["RandomForestClassifier", "fit"]


def test_arguments_before_enclosing_call():
    events = extract_calls(script("model.fit(scaler.transform(X))"))
    assert [e.raw_name for e in events] == ["scaler.transform", "model.fit"]


def test_evaluation_order_walk():
    # receiver, then positional args, then keywords, then the call itself
    text = "a(b(c()), d(), k=e()).m(f())"
    assert [e.raw_name for e in extract_calls(script(text))] == [
        "c", "b", "d", "e", "a", "f", "<expr>.m",
    ]


def test_assignment_value_before_targets():
    text = "obj.attr[key()] = value()"
    assert [e.raw_name for e in extract_calls(script(text))] == ["value", "key"]


def test_decorators_before_body():
    text = "@deco(arg())\ndef f():\n    return body()\n"
    assert [e.raw_name for e in extract_calls(script(text))] == ["arg", "deco", "body"]


def test_from_import_and_submodule_import():
    text = (
        "from sklearn.ensemble import RandomForestClassifier as RF\n"
        "import os.path\n"
        "RF()\nos.path.join('a')\n"
    )
    assert resolved(script(text)) == ["sklearn.ensemble.RandomForestClassifier", "os.path.join"]


def test_star_import_unresolved():
    text = "from sklearn.linear_model import *\nLogisticRegression()\n"
    (event,) = extract_calls(script(text))
    assert event.resolved_name == event.raw_name == "LogisticRegression"


def test_unknown_receiver_keeps_method_name():
    (event,) = extract_calls(script("model.fit(x)"))
    assert event.resolved_name == "model.fit"
    assert event.method_name == "fit"


def test_non_name_callee_skipped():
    assert resolved(script("Conv2D(32)(x)")) == ["Conv2D"]


def test_alias_env_persists_across_cells():
    unit = notebook(("code", "import numpy as np"), ("markdown", "## x"), ("code", "np.zeros(3)"))
    (event,) = extract_calls(unit)
    assert event.resolved_name == "numpy.zeros"
    assert event.cell_index == 2


def test_magics_dropped_and_line_numbers_kept():
    unit = notebook(("code", "%matplotlib inline\n!pip install x\nimport pandas as pd\npd.read_csv('f')"))
    (event,) = extract_calls(unit)
    assert event.resolved_name == "pandas.read_csv"
    assert event.line == 4


def test_bad_notebook_cell_skipped_with_diagnostic():
    unit = notebook(("code", "f()"), ("code", "def broken(:\n"), ("code", "g()"))
    diags: list = []
    events = extract_calls(unit, diags)
    assert [e.raw_name for e in events] == ["f", "g"]
    assert [e.order_index for e in events] == [0, 1]
    assert len(diags) == 1 and diags[0].cell_index == 1


def test_bad_script_is_hard_error():
    with pytest.raises(ScriptSyntaxError):
        extract_calls(script("def broken(:\n"))


def test_alias_resolution_idempotent():
    env = AliasEnv({"pd": "pandas", "np": "numpy"})
    for raw in ["pd.read_csv", "np.linalg.norm", "model.fit", "pandas.read_csv"]:
        once = env.resolve(raw)
        assert env.resolve(once) == once


# --- headings ------------------------------------------------------------


def test_headings():
    unit = notebook(
        ("code", "x = 1"),
        ("markdown", "## Feature Engineering"),
        ("markdown", "# **Load** data\ntext\n### Model `fit`\n```\n# not a heading\n```"),
    )
    assert extract_headings(unit) == [(1, "Feature Engineering"), (2, "Load data"), (2, "Model fit")]


def test_no_markdown_no_headings():
    assert extract_headings(notebook(("code", "x = 1"))) == []


# --- metrics -------------------------------------------------------------


def test_straight_line_ratio_zero():
    text = "a = 1\nb = f(a)\nc = a + b\nprint(c)\nd = [a, b]\n"
    assert ast_metrics(script(text)).linearity_ratio == 0.0


def test_while_wrapping_if():
    text = "while x:\n    if y:\n        pass\n"
    m = ast_metrics(script(text))
    assert m.control_nodes == 2
    # Module, While, Name, If, Name, Pass
    assert m.total_nodes == 6


# --- properties ----------------------------------------------------------

_names = st.sampled_from(["a", "b", "pd", "np", "model", "x"])


def _expr(depth: int):
    leaf = st.one_of(_names, st.integers(0, 9).map(str))
    if depth == 0:
        return leaf

    sub = _expr(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(_names, st.lists(sub, max_size=3)).map(lambda t: f"{t[0]}({', '.join(t[1])})"),
        st.tuples(_names, _names, sub).map(lambda t: f"{t[0]}.{t[1]}({t[2]})"),
        st.tuples(sub, sub, sub).map(lambda t: f"({t[0]} if {t[1]} else {t[2]})"),
        st.tuples(sub, sub).map(lambda t: f"({t[0]} + {t[1]})"),
    )


def _block(depth: int):
    simple = st.one_of(
        st.tuples(_names, _expr(2)).map(lambda t: [f"{t[0]} = {t[1]}"]),
        _expr(2).map(lambda e: [e]),
        st.just(["import pandas as pd"]),
        st.just(["from numpy import zeros as np"]),
    )
    if depth == 0:
        return st.lists(simple, min_size=1, max_size=3).map(lambda bs: sum(bs, []))

    inner = _block(depth - 1).map(lambda lines: ["    " + ln for ln in lines])
    compound = st.one_of(
        st.tuples(_expr(1), inner).map(lambda t: [f"if {t[0]}:", *t[1]]),
        st.tuples(_names, _expr(1), inner).map(lambda t: [f"for {t[0]} in {t[1]}:", *t[2]]),
        st.tuples(_expr(1), inner).map(lambda t: [f"while {t[0]}:", *t[1]]),
        st.tuples(_names, inner).map(lambda t: [f"def {t[0]}():", *t[1]]),
    )
    return st.lists(st.one_of(simple, compound), min_size=1, max_size=4).map(lambda bs: sum(bs, []))


programs = _block(2).map(lambda lines: "\n".join(lines) + "\n")


@settings(max_examples=150, deadline=None)
@given(programs)
def test_metrics_bounds(text):
    m = ast_metrics(script(text))
    assert 0 <= m.control_nodes <= m.total_nodes
    assert 0.0 <= m.linearity_ratio <= 1.0


@settings(max_examples=150, deadline=None)
@given(st.lists(programs, min_size=1, max_size=3))
def test_extract_deterministic_and_ordered(cells):
    unit = notebook(*(("code", c) for c in cells))
    first = extract_calls(unit)
    assert first == extract_calls(notebook(*(("code", c) for c in cells)))
    assert [e.order_index for e in first] == list(range(len(first)))
    assert [e.cell_index for e in first] == sorted(e.cell_index for e in first)
    by_position = sorted(first, key=lambda e: (e.cell_index, e.line))
    assert sorted(e.cell_index for e in by_position) == [e.cell_index for e in by_position]
