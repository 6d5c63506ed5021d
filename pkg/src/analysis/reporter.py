"""
Terminal Reporting
Rich tables for experiment summaries.
"""

import json
import math
from typing import Any, Dict, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from .records import to_jsonable
from .runner import RunOutcome

MAX_ROWS = 40


def format_cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.4g}"
    return str(value)


def build_table(title: str, rows: List[Dict[str, Any]],
                columns: Optional[Sequence[str]] = None,
                max_rows: int = MAX_ROWS) -> Table:
    """
    Table of row dictionaries.

    Args:
        title: Table title
        rows: Rows; columns default to the keys of the first row
        columns: Columns to show
        max_rows: Rows beyond this are elided

    Returns:
        rich Table
    """
    columns = list(columns or (rows[0].keys() if rows else []))
    table = Table(title=title, show_lines=False)
    for name in columns:
        table.add_column(name, justify="right" if name not in ('family', 'first', 'second', 'suite')
                         else "left")
    for row in rows[:max_rows]:
        table.add_row(*(format_cell(row.get(name)) for name in columns))
    if len(rows) > max_rows:
        table.caption = f"{len(rows) - max_rows} more rows in the curve file"
    return table


def render_outcome(outcome: RunOutcome, console: Optional[Console] = None):
    """Print the table, summary and artifact paths of a finished run."""
    console = console or Console()
    if outcome.rows:
        console.print(build_table(outcome.title, outcome.rows))
    if outcome.summary:
        console.print(outcome.title if not outcome.rows else "Summary")
        console.print(json.dumps(to_jsonable(outcome.summary), indent=2, sort_keys=True))
    for kind, path in sorted(outcome.artifacts.items()):
        console.print(f"{kind}: {path}")
    if outcome.status:
        console.print(f"[red]{outcome.experiment} reported failures[/red]")
