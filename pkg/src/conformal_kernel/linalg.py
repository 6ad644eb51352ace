"""Exact linear algebra over Q: Gaussian elimination for the ansatz solvers."""

from __future__ import annotations

from .symcore import Q


def solve_exact(rows: list[list[Q]], rhs: list[Q]) -> list[Q] | None:
    """Solve A x = b over Q; returns one solution (free variables set to 0)
    or None when the system is inconsistent."""
    if not rows:
        return []
    ncols = len(rows[0])
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(aug)):
            if aug[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = Q(1) / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][ncols] != 0:
            return None
    x = [Q(0)] * ncols
    for ri, c in pivots:
        x[c] = aug[ri][ncols]
    return x
