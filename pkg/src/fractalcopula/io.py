"""Text formats and figure rendering.

Three line-oriented text formats, all exact and round-tripping byte for byte:

* transformation matrix: one line per row, top row first, whitespace-separated
  tokens ``a`` or ``a/b``; ``#`` starts a comment; floats are rejected.
* copula: ``xbreaks:`` line, ``ybreaks:`` line, then one mass line per y-cell,
  top (largest y) first, each holding one token per x-cell.
* step map: ``targets:`` line, ``sources:`` line, then one line of 0-based
  target indices, one per source cell.

Figures render to binary PGM (P5, maxval 255): darker means higher density,
pure white means zero mass. With a threshold the output is a two-tone support
mask instead. The CSV renderer lists the nonzero cells with exact geometry.
"""

from __future__ import annotations

from .copula import PatchedCopula, from_parts
from ._rat import ZERO, floor_div, format_rat, parse_rat, rat
from .errors import IoError, ParseError
from .markov import StepMap, stepmap
from .tmatrix import TransformationMatrix, from_rows


def _significant_lines(text: str):
    """Yield (1-based line number, content) with comments and blanks removed."""
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _parse_tokens(line: str, no: int):
    out = []
    for tok in line.split():
        try:
            out.append(parse_rat(tok))
        except ValueError as exc:
            raise ParseError(str(exc), line=no) from None
    return out


def parse_matrix(text: str) -> TransformationMatrix:
    """Parse and validate a transformation matrix from its text form."""
    rows = []
    width = None
    for no, line in _significant_lines(text):
        row = _parse_tokens(line, no)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(
                "row has %d entries, previous rows have %d" % (len(row), width),
                line=no,
            )
        rows.append(row)
    if not rows:
        raise ParseError("no matrix rows found")
    return from_rows(rows)


def write_matrix(t: TransformationMatrix) -> str:
    """Canonical text form; ``parse_matrix`` inverts it exactly."""
    lines = [
        " ".join(format_rat(v) for v in row) for row in t.rows_top_down()
    ]
    return "\n".join(lines) + "\n"


def parse_copula(text: str) -> PatchedCopula:
    """Parse and validate a copula from its text form."""
    lines = list(_significant_lines(text))
    if len(lines) < 3:
        raise ParseError("need xbreaks, ybreaks and at least one mass line")
    no, first = lines[0]
    if not first.startswith("xbreaks:"):
        raise ParseError("expected 'xbreaks:' first", line=no)
    xb = _parse_tokens(first[len("xbreaks:"):], no)
    no, second = lines[1]
    if not second.startswith("ybreaks:"):
        raise ParseError("expected 'ybreaks:' second", line=no)
    yb = _parse_tokens(second[len("ybreaks:"):], no)
    ny = len(yb) - 1
    nx = len(xb) - 1
    body = lines[2:]
    if len(body) != ny:
        raise ParseError(
            "expected %d mass lines (one per y-cell), found %d" % (ny, len(body)),
            line=body[-1][0] if body else no,
        )
    mass = [[None] * ny for _ in range(nx)]
    for r, (no, line) in enumerate(body):
        row = _parse_tokens(line, no)
        if len(row) != nx:
            raise ParseError(
                "mass line has %d entries, x-mesh has %d cells" % (len(row), nx),
                line=no,
            )
        j = ny - 1 - r  # top line first
        for i in range(nx):
            mass[i][j] = row[i]
    return from_parts(xb, yb, mass)


def write_copula(c: PatchedCopula) -> str:
    """Canonical text form; ``parse_copula`` inverts it exactly."""
    lines = [
        "xbreaks: " + " ".join(format_rat(b) for b in c.x_breaks),
        "ybreaks: " + " ".join(format_rat(b) for b in c.y_breaks),
    ]
    for j in reversed(range(c.ny)):
        lines.append(" ".join(format_rat(c.mass[i][j]) for i in range(c.nx)))
    return "\n".join(lines) + "\n"


def parse_stepmap(text: str) -> StepMap:
    """Parse and validate a step map from its text form."""
    lines = list(_significant_lines(text))
    if len(lines) != 3:
        raise ParseError("step map needs exactly targets, sources and assignment")
    no, first = lines[0]
    if not first.startswith("targets:"):
        raise ParseError("expected 'targets:' first", line=no)
    tgt = _parse_tokens(first[len("targets:"):], no)
    no, second = lines[1]
    if not second.startswith("sources:"):
        raise ParseError("expected 'sources:' second", line=no)
    src = _parse_tokens(second[len("sources:"):], no)
    no, third = lines[2]
    assign = []
    for tok in third.split():
        if not tok.isdigit():
            raise ParseError("assignment entries are 0-based integers, got %r" % tok, line=no)
        assign.append(int(tok))
    return stepmap(src, tgt, assign)


def write_stepmap(f: StepMap) -> str:
    """Canonical text form; ``parse_stepmap`` inverts it exactly."""
    return (
        "targets: " + " ".join(format_rat(b) for b in f.target_breaks) + "\n"
        "sources: " + " ".join(format_rat(b) for b in f.source_breaks) + "\n"
        + " ".join(str(a) for a in f.assignment) + "\n"
    )


def _cell_lookup(breaks, count: int) -> list[int]:
    """Cell index of each of ``count`` pixel centers along one axis."""
    out = []
    cell = 0
    for pix in range(count):
        center = rat(2 * pix + 1, 2 * count)
        while breaks[cell + 1] < center:
            cell += 1
        out.append(cell)
    return out


def render_pgm(
    c: PatchedCopula,
    width: int,
    height: int,
    path=None,
    threshold=None,
) -> bytes:
    """Render the density to a binary PGM (P5, maxval 255).

    Each pixel samples the density at its center; its value is
    ``255 - round(255 * d / d_max)`` with round half up, so the densest cell
    is black and empty cells are white. With ``threshold`` the image is a
    support mask instead: black exactly where the density exceeds the
    threshold. Output bytes depend only on the copula and the arguments.
    Returns the bytes; writes them to ``path`` when given.
    """
    if width < 1 or height < 1:
        raise IoError("image size must be positive, got %dx%d" % (width, height))
    dens = [
        [c.mass[i][j] / (c.dx(i) * c.dy(j)) for j in range(c.ny)]
        for i in range(c.nx)
    ]
    if threshold is None:
        dmax = max(max(col) for col in dens)
        half = rat(1, 2)
        shade = [
            [255 - floor_div(255 * d / dmax + half) for d in col] for col in dens
        ]
    else:
        thr = rat(threshold)
        shade = [[0 if d > thr else 255 for d in col] for col in dens]
    cols = _cell_lookup(c.x_breaks, width)
    rows = _cell_lookup(c.y_breaks, height)
    body = bytearray()
    for r in range(height):
        j = rows[height - 1 - r]  # top pixel row is the highest y-cell
        body.extend(shade[cols[cpix]][j] for cpix in range(width))
    out = b"P5\n%d %d\n255\n" % (width, height) + bytes(body)
    if path is not None:
        try:
            with open(path, "wb") as fh:
                fh.write(out)
        except OSError as exc:
            raise IoError("cannot write %s: %s" % (path, exc)) from exc
    return out


def render_csv(c: PatchedCopula, path=None) -> str:
    """List nonzero cells as ``i,j,x0,x1,y0,y1,mass`` lines (0-based indices).

    Rows are ordered by x-cell then y-cell. Returns the text; writes it to
    ``path`` when given.
    """
    lines = []
    for i in range(c.nx):
        for j in range(c.ny):
            m = c.mass[i][j]
            if m == ZERO:
                continue
            lines.append(
                "%d,%d,%s,%s,%s,%s,%s"
                % (
                    i,
                    j,
                    format_rat(c.x_breaks[i]),
                    format_rat(c.x_breaks[i + 1]),
                    format_rat(c.y_breaks[j]),
                    format_rat(c.y_breaks[j + 1]),
                    format_rat(m),
                )
            )
    text = "\n".join(lines) + "\n"
    if path is not None:
        try:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError("cannot write %s: %s" % (path, exc)) from exc
    return text
