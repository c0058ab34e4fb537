"""Minimal line diff used to feed edited-line margins."""

from __future__ import annotations


def diff_lines(old_text: str, new_text: str) -> set[int]:
    """Line numbers (0-based) changed or inserted in ``new_text``.

    Lines are matched by a longest-common-subsequence over whole lines; a
    pure deletion marks no new lines. Identical texts yield the empty set.
    """
    old = old_text.split("\n")
    new = new_text.split("\n")
    if old == new:
        return set()
    n, m = len(old), len(new)
    # lcs[i][j] = LCS length of old[i:], new[j:]
    lcs = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = lcs[i]
        below = lcs[i + 1]
        for j in range(m - 1, -1, -1):
            if old[i] == new[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    matched: set[int] = set()
    i = j = 0
    while i < n and j < m:
        if old[i] == new[j]:
            matched.add(j)
            i += 1
            j += 1
        elif lcs[i + 1][j] >= lcs[i][j + 1]:
            i += 1
        else:
            j += 1
    return {j for j in range(m) if j not in matched}
