"""One line per acceptance criterion, printed whether or not output capture is on."""

import pytest

from alphalim.gallery import ROWS

CRITERIA = [
    (1, "exactness", 5.0),
    (2, "sine", None),
    (3, "extended-sine", None),
    (4, "chain", None),
    (5, "F4", 1.0),
    (6, "arc", None),
    (7, "zero-dim", None),
    (8, "line", None),
    (9, "af-survey:Z", 60.0),
    (10, "quotient", None),
    (11, "soundness", None),
]


@pytest.mark.parametrize("number,key,limit", CRITERIA, ids=[f"{n:02d}-{k}" for n, k, _ in CRITERIA])
def test_criterion(number, key, limit, capsys):
    row = ROWS[key]()
    line = f"criterion {number:2d}: {row.line()}"
    if limit is not None:
        fast = row.seconds < limit
        line += f" | runtime {'within' if fast else 'over'} {limit:g}s"
    with capsys.disabled():
        print("\n" + line)
    assert row.passed, row.observed
    if limit is not None:
        assert fast, f"{row.seconds:.2f}s >= {limit}s"
