"""Graphviz DOT rendering of pipelines."""

from __future__ import annotations

from .pipeline import Pipeline


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pipeline_to_dot(p: Pipeline, merged: bool = False, name: str = "pipeline") -> str:
    """One node per stage occurrence chained in order, or with ``merged``
    one node per distinct stage and count-labelled edges."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    if p.source:
        lines.append(f"  label={_quote(p.source)};")
    if merged:
        seen = []
        for stage in p.stages:
            if stage not in seen:
                seen.append(stage)
        for stage in seen:
            lines.append(f"  {stage.code} [label={_quote(stage.code)}];")
        for (a, b), n in p.edges.items():
            lines.append(f"  {a.code} -> {b.code} [label={_quote(str(n))}];")
    else:
        for i, occ in enumerate(p.sequence):
            lines.append(f"  n{i} [label={_quote(occ.label)}];")
        for i in range(len(p.sequence) - 1):
            lines.append(f"  n{i} -> n{i + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"
