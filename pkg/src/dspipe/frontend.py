"""Parse scripts and notebooks and mine the API calls they make.

Calls are reported in evaluation order: arguments and receivers are
evaluated before the call that consumes them, statements follow source
order and notebook cells follow document order.  Import statements feed an
alias environment that persists across cells, so ``pd.read_csv`` resolves
to ``pandas.read_csv`` no matter which cell imported pandas.
"""

from __future__ import annotations

import ast
import enum
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

# Placeholder segment for a receiver that is not a plain name chain,
# e.g. ``pd.read_csv(p).fillna(0)`` yields ``<expr>.fillna`` for the outer call.
EXPR_SEGMENT = "<expr>"

CONTROL_NODE_TYPES = (ast.If, ast.IfExp, ast.For, ast.AsyncFor, ast.While)


class SourceError(Exception):
    """Base class for problems reading or parsing an input file."""


class MalformedNotebookError(SourceError):
    def __init__(self, path: str, json_path: str, message: str) -> None:
        super().__init__(f"{path}: malformed notebook at {json_path}: {message}")
        self.path = path
        self.json_path = json_path


class ScriptSyntaxError(SourceError):
    pass


class UnitKind(enum.Enum):
    SCRIPT = "script"
    NOTEBOOK = "notebook"


class CellKind(enum.Enum):
    CODE = "code"
    MARKDOWN = "markdown"


@dataclass(frozen=True)
class Cell:
    index: int
    kind: CellKind
    text: str
    headings: tuple[str, ...] = ()


@dataclass(frozen=True)
class SourceUnit:
    path: str
    kind: UnitKind
    cells: tuple[Cell, ...]

    @property
    def code_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.kind is CellKind.CODE]


@dataclass(frozen=True)
class CallEvent:
    raw_name: str
    resolved_name: str
    method_name: str
    line: int
    cell_index: int
    order_index: int

    def to_json(self) -> dict:
        return {
            "order": self.order_index,
            "cell": self.cell_index,
            "line": self.line,
            "raw": self.raw_name,
            "resolved": self.resolved_name,
        }


@dataclass(frozen=True)
class AstMetrics:
    total_nodes: int
    control_nodes: int

    @property
    def linearity_ratio(self) -> float:
        if self.total_nodes == 0:
            return 0.0
        return self.control_nodes / self.total_nodes

    def __add__(self, other: AstMetrics) -> AstMetrics:
        return AstMetrics(
            self.total_nodes + other.total_nodes, self.control_nodes + other.control_nodes
        )

    def to_json(self) -> dict:
        return {
            "total_nodes": self.total_nodes,
            "control_nodes": self.control_nodes,
            "linearity_ratio": self.linearity_ratio,
        }


@dataclass
class Diagnostic:
    path: str
    cell_index: int
    message: str

    def __str__(self) -> str:
        return f"{self.path}: cell {self.cell_index}: {self.message}"


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

_HEADING_RE = re.compile(r"^ {0,3}(#+)(.*)$")
_FENCE_RE = re.compile(r"^ {0,3}(```|~~~)")


def _markdown_headings(text: str) -> tuple[str, ...]:
    headings = []
    in_fence = False
    for line in text.splitlines():
        if _FENCE_RE.match(line):
            in_fence = not in_fence
            continue
        if in_fence:
            continue
        m = _HEADING_RE.match(line)
        if not m:
            continue
        title = _strip_markup(m.group(2))
        if title:
            headings.append(title)
    return tuple(headings)


def _strip_markup(text: str) -> str:
    text = text.strip().rstrip("#").strip()
    text = re.sub(r"<[^>]+>", "", text)  # inline html such as <a id=...>
    text = re.sub(r"\[([^\]]*)\]\([^)]*\)", r"\1", text)
    text = re.sub(r"[*_`]+", "", text)
    return " ".join(text.split())


def _join_source(source, path: str, where: str) -> str:
    if isinstance(source, str):
        return source
    if isinstance(source, list):
        for i, piece in enumerate(source):
            if not isinstance(piece, str):
                raise MalformedNotebookError(path, f"{where}[{i}]", "expected a string")
        return "".join(source)
    raise MalformedNotebookError(path, where, "expected a string or a list of strings")


def parse_notebook(text: str, path: str = "<notebook>") -> SourceUnit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedNotebookError(path, "$", f"invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise MalformedNotebookError(path, "$", "top level must be an object")
    raw_cells = doc.get("cells")
    if not isinstance(raw_cells, list):
        raise MalformedNotebookError(path, "$.cells", "expected a list of cells")

    cells = []
    for i, raw in enumerate(raw_cells):
        where = f"$.cells[{i}]"
        if not isinstance(raw, dict):
            raise MalformedNotebookError(path, where, "expected an object")
        cell_type = raw.get("cell_type")
        if not isinstance(cell_type, str):
            raise MalformedNotebookError(path, f"{where}.cell_type", "missing or not a string")
        if "source" not in raw:
            raise MalformedNotebookError(path, f"{where}.source", "missing")
        source = _join_source(raw["source"], path, f"{where}.source")
        if cell_type == "code":
            cells.append(Cell(i, CellKind.CODE, source))
        elif cell_type == "markdown":
            cells.append(Cell(i, CellKind.MARKDOWN, source, _markdown_headings(source)))
        # raw cells and other types carry neither calls nor headings
    return SourceUnit(path, UnitKind.NOTEBOOK, tuple(cells))


def load_source(path: str | Path) -> SourceUnit:
    """Read a ``.py`` script or an ``.ipynb`` notebook from disk."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".ipynb":
        return parse_notebook(text, str(path))
    return SourceUnit(str(path), UnitKind.SCRIPT, (Cell(0, CellKind.CODE, text),))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _drop_magics(text: str) -> str:
    # Blank out rather than delete so line numbers stay aligned with the cell.
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if line.lstrip().startswith(("%", "!")):
            lines[i] = ""
    return "\n".join(lines)


def parse_cells(
    unit: SourceUnit, diagnostics: list[Diagnostic] | None = None
) -> list[tuple[Cell, ast.Module]]:
    """Parse every code cell; notebook cells with syntax errors are skipped.

    A script that fails to parse raises :class:`ScriptSyntaxError`.
    """
    parsed = []
    for cell in unit.code_cells:
        text = cell.text
        if unit.kind is UnitKind.NOTEBOOK:
            text = _drop_magics(text)
        try:
            tree = ast.parse(text)
        except (SyntaxError, ValueError) as exc:
            if unit.kind is UnitKind.SCRIPT:
                raise ScriptSyntaxError(f"{unit.path}: {exc}") from None
            diag = Diagnostic(unit.path, cell.index, f"skipped, does not parse: {exc}")
            logger.debug("%s", diag)
            if diagnostics is not None:
                diagnostics.append(diag)
            continue
        parsed.append((cell, tree))
    return parsed


# ---------------------------------------------------------------------------
# alias resolution
# ---------------------------------------------------------------------------


@dataclass
class AliasEnv:
    """Maps a bound local name to the dotted path it was imported as."""

    names: dict[str, str] = field(default_factory=dict)

    def bind_import(self, node: ast.Import) -> None:
        for alias in node.names:
            if alias.asname:
                self.names[alias.asname] = alias.name
            else:
                # ``import a.b.c`` binds only ``a``
                root = alias.name.split(".")[0]
                self.names[root] = root

    def bind_import_from(self, node: ast.ImportFrom) -> None:
        module = node.module or ""
        for alias in node.names:
            if alias.name == "*":
                continue  # star imports leave names unresolved
            target = f"{module}.{alias.name}" if module else alias.name
            self.names[alias.asname or alias.name] = target

    def resolve(self, raw_name: str) -> str:
        root, sep, rest = raw_name.partition(".")
        target = self.names.get(root)
        if target is None:
            return raw_name
        return target + sep + rest


def _dotted_chain(node: ast.expr) -> list[str] | None:
    """Segments of ``a.b.c``; the innermost non-name receiver becomes EXPR_SEGMENT."""
    parts: list[str] = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
    elif parts:
        parts.append(EXPR_SEGMENT)
    else:
        return None  # e.g. ``Conv2D(...)(x)`` or ``funcs[0]()``
    parts.reverse()
    return parts


class _CallCollector(ast.NodeVisitor):
    def __init__(self, env: AliasEnv) -> None:
        self.env = env
        self.cell_index = 0
        self.events: list[CallEvent] = []

    # Right-hand sides run before their targets.
    def visit_Assign(self, node: ast.Assign) -> None:
        self.visit(node.value)
        for target in node.targets:
            self.visit(target)

    def visit_AugAssign(self, node: ast.AugAssign) -> None:
        self.visit(node.value)
        self.visit(node.target)

    def visit_AnnAssign(self, node: ast.AnnAssign) -> None:
        if node.value is not None:
            self.visit(node.value)
        self.visit(node.target)
        self.visit(node.annotation)

    def visit_NamedExpr(self, node: ast.NamedExpr) -> None:
        self.visit(node.value)
        self.visit(node.target)

    def _visit_def(self, node) -> None:
        for deco in node.decorator_list:
            self.visit(deco)
        for name, value in ast.iter_fields(node):
            if name == "decorator_list":
                continue
            if isinstance(value, list):
                for item in value:
                    if isinstance(item, ast.AST):
                        self.visit(item)
            elif isinstance(value, ast.AST):
                self.visit(value)

    visit_FunctionDef = visit_AsyncFunctionDef = visit_ClassDef = _visit_def

    def visit_Import(self, node: ast.Import) -> None:
        self.env.bind_import(node)

    def visit_ImportFrom(self, node: ast.ImportFrom) -> None:
        self.env.bind_import_from(node)

    def visit_Call(self, node: ast.Call) -> None:
        # func (including any receiver call) -> positional args -> keywords -> the call itself
        self.generic_visit(node)
        chain = _dotted_chain(node.func)
        if chain is None:
            return
        raw = ".".join(chain)
        resolved = raw if chain[0] == EXPR_SEGMENT else self.env.resolve(raw)
        self.events.append(
            CallEvent(
                raw_name=raw,
                resolved_name=resolved,
                method_name=chain[-1],
                line=node.lineno,
                cell_index=self.cell_index,
                order_index=len(self.events),
            )
        )


def extract_calls(
    unit: SourceUnit,
    diagnostics: list[Diagnostic] | None = None,
    *,
    parsed: list[tuple[Cell, ast.Module]] | None = None,
) -> list[CallEvent]:
    """Return every named call in ``unit`` in evaluation order."""
    if parsed is None:
        parsed = parse_cells(unit, diagnostics)
    collector = _CallCollector(AliasEnv())
    for cell, tree in parsed:
        collector.cell_index = cell.index
        collector.visit(tree)
    return collector.events


# ---------------------------------------------------------------------------
# structure metrics and headings
# ---------------------------------------------------------------------------


def tree_metrics(tree: ast.AST) -> AstMetrics:
    total = control = 0
    for node in ast.walk(tree):
        # Load/Store/Del are shared context markers, not syntax
        if isinstance(node, ast.expr_context):
            continue
        total += 1
        if isinstance(node, CONTROL_NODE_TYPES):
            control += 1
    return AstMetrics(total, control)


def ast_metrics(
    unit: SourceUnit, *, parsed: list[tuple[Cell, ast.Module]] | None = None
) -> AstMetrics:
    if parsed is None:
        parsed = parse_cells(unit)
    metrics = AstMetrics(0, 0)
    for _, tree in parsed:
        metrics = metrics + tree_metrics(tree)
    return metrics


def extract_headings(unit: SourceUnit) -> list[tuple[int, str]]:
    return [(cell.index, h) for cell in unit.cells for h in cell.headings]
