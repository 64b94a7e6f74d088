"""A small catalog of worked example matrices.

These are the running examples used across the tests and the README:

* ``A1`` and ``A2``: symmetric 3 x 3 matrices sharing the same support
  (four corners plus the center) and the same invariant pairs, with
  contraction factors r^2 = 1/4 and 2/9. A2's corner block has rank one and
  factorizes; A1's corner block has rank two and does not.
* ``A3``: an asymmetric variant with unequal column and row widths whose
  blocks are rank one; ``L3`` and ``R3`` are its factors, ``L2``/``R2``
  those of A2.
* ``A3_PRINTED_ROWS``: a circulating misprint of A3 whose center entry reads
  1/3 instead of 3/10, making the total mass 31/30. It is kept here raw so
  validation keeps rejecting it; this library never renormalizes quietly.
* ``symmetric_family(r)``: the one-parameter family with mass r/2 in each
  corner and 1 - 2r in the center, defined for 0 < r < 1/2; r = 1/3 is A2.

Run ``python -m fractalcopula.catalog --export DIR`` to dump the catalog as
matrix files for use with the command line tool (the same files ship inside
the package under ``data/``).
"""

from __future__ import annotations

from ._rat import rat
from .errors import OutOfRange
from .tmatrix import TransformationMatrix, from_rows

A1 = from_rows(
    [
        ["1/12", "0", "1/4"],
        ["0", "1/3", "0"],
        ["1/4", "0", "1/12"],
    ]
)

A2 = from_rows(
    [
        ["1/6", "0", "1/6"],
        ["0", "1/3", "0"],
        ["1/6", "0", "1/6"],
    ]
)

A3 = from_rows(
    [
        ["3/28", "0", "27/140"],
        ["0", "3/10", "0"],
        ["1/7", "0", "9/35"],
    ]
)

A3_PRINTED_ROWS = [
    ["3/28", "0", "27/140"],
    ["0", "1/3", "0"],
    ["1/7", "0", "9/35"],
]

L2 = from_rows(
    [
        ["0", "1/3", "0"],
        ["1/3", "0", "1/3"],
    ]
)

R2 = from_rows(
    [
        ["1/3", "0"],
        ["0", "1/3"],
        ["1/3", "0"],
    ]
)

L3 = from_rows(
    [
        ["0", "3/10", "0"],
        ["1/4", "0", "9/20"],
    ]
)

R3 = from_rows(
    [
        ["3/10", "0"],
        ["0", "3/10"],
        ["2/5", "0"],
    ]
)

NAMED = {
    "a1": A1,
    "a2": A2,
    "a3": A3,
    "l2": L2,
    "r2": R2,
    "l3": L3,
    "r3": R3,
}


def symmetric_family(r) -> TransformationMatrix:
    """Corner mass r/2 each, center 1 - 2r; needs 0 < r < 1/2."""
    r = rat(r)
    if not rat(0) < r < rat(1, 2):
        raise OutOfRange("family parameter must lie in (0, 1/2), got %s" % r)
    half = r / 2
    center = 1 - 2 * r
    return from_rows(
        [
            [half, 0, half],
            [0, center, 0],
            [half, 0, half],
        ]
    )


def data_path(name: str):
    """Filesystem path of a shipped matrix file, e.g. ``data_path("a2.txt")``."""
    from importlib.resources import files

    return files(__package__) / "data" / name


def _export(directory: str) -> list[str]:
    import os

    from .io import write_matrix

    os.makedirs(directory, exist_ok=True)
    written = []
    for name, matrix in NAMED.items():
        path = os.path.join(directory, name + ".txt")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(write_matrix(matrix))
        written.append(path)
    return written


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(
        prog="python -m fractalcopula.catalog",
        description="Export the example matrices as text files.",
    )
    parser.add_argument("--export", metavar="DIR", required=True)
    args = parser.parse_args(argv)
    for path in _export(args.export):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
