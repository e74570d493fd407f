"""CSV + gnuplot emission. Output bytes depend only on the table and scenario."""

import math
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import thzmec


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    scenario: object = None
    preset: str = ""
    series: str = ""  # column that splits the rows into curves, if any
    x: str = "users"


def git_revision():
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], cwd=here, capture_output=True, text=True, timeout=5
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else "unknown"


def _cell(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".12g")
    return str(v)


def metadata_lines(table, revision=None):
    s = table.scenario
    lines = [f"thzmec {thzmec.__version__}", f"table: {table.name}"]
    if table.preset:
        lines.append(f"preset: {table.preset}")
    if s is not None:
        lines += [f"scenario_hash: {s.digest()}", f"seed: {s.seed}", f"trials: {s.trials}"]
    lines.append(f"git_revision: {revision or git_revision()}")
    return ["# " + ln for ln in lines]


def render_csv(table, revision=None):
    out = metadata_lines(table, revision)
    out.append(",".join(table.columns))
    out += [",".join(_cell(v) for v in row) for row in table.rows]
    return "\n".join(out) + "\n"


def render_gnuplot(table, csv_name, skip):
    """Script plotting every value column against ``table.x``, one curve per series value."""
    cols = table.columns
    xi = cols.index(table.x) + 1
    si = cols.index(table.series) + 1 if table.series else None
    ys = [c for c in cols if c not in (table.x, table.series) and not c.startswith("std_")
          and c not in ("infeasible_rate", "trials_used")]
    lines = [
        f"# companion script for {csv_name}",
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        "set grid",
        f"set xlabel '{table.x}'",
    ]
    series_vals = sorted({row[si - 1] for row in table.rows}) if si else [None]
    for y in ys:
        yi = cols.index(y) + 1
        lines += [f"set output '{table.name}_{y}.png'", f"set ylabel '{y}'"]
        curves = []
        for v in series_vals:
            if v is None:
                curves.append(f"'{csv_name}' skip {skip} using {xi}:{yi} with linespoints title '{y}'")
            else:
                lit = _cell(v)
                curves.append(
                    f"'{csv_name}' skip {skip} using {xi}:(${si}=={lit} ? ${yi} : 1/0) "
                    f"with linespoints title '{table.series}={lit}'"
                )
        lines.append("plot " + ", \\\n     ".join(curves))
    return "\n".join(lines) + "\n"


def emit_outputs(tables, out_dir):
    """Write ``<name>.csv`` and ``<name>.gp`` per table; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    revision = git_revision()
    written = []
    for t in tables:
        text = render_csv(t, revision)
        skip = len(metadata_lines(t, revision)) + 1
        csv_path = out_dir / f"{t.name}.csv"
        gp_path = out_dir / f"{t.name}.gp"
        csv_path.write_text(text)
        gp_path.write_text(render_gnuplot(t, csv_path.name, skip))
        written += [csv_path, gp_path]
    return written
