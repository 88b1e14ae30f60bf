"""Minimal non-negative solutions of homogeneous linear Diophantine systems.

Breadth-first completion in the style of Contejean and Devie: candidate
vectors start at the unit vectors and are only grown along directions that
move the defect back towards zero.  The result is the (finite) Hilbert basis
of ``{x in N^n | A x = 0}``.
"""

from __future__ import annotations

from typing import Sequence


class DiophantineLimit(RuntimeError):
    """The configured basis or search cap was exceeded."""


def _defect(rows: Sequence[Sequence[int]], v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in rows)


def _geq(v: Sequence[int], w: Sequence[int]) -> bool:
    return all(a >= b for a, b in zip(v, w))


def hilbert_basis(rows: Sequence[Sequence[int]], *, max_basis: int = 2000,
                  max_candidates: int = 200_000) -> list[tuple[int, ...]]:
    """Minimal non-zero solutions ``x >= 0`` of ``rows @ x == 0``."""
    if not rows:
        raise ValueError("empty system")
    n = len(rows[0])
    units = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    unit_defects = [_defect(rows, e) for e in units]
    basis: list[tuple[int, ...]] = []
    frontier = list(dict.fromkeys(units))
    explored = 0
    while frontier:
        nxt: dict[tuple[int, ...], None] = {}
        for v in frontier:
            d = _defect(rows, v)
            if not any(d):
                if not any(_geq(v, b) for b in basis):
                    basis.append(v)
                    if len(basis) > max_basis:
                        raise DiophantineLimit(f"Diophantine basis exceeds {max_basis} vectors")
                continue
            for j, dj in enumerate(unit_defects):
                if sum(a * b for a, b in zip(d, dj)) >= 0:
                    continue
                w = tuple(x + (1 if k == j else 0) for k, x in enumerate(v))
                if w in nxt or any(_geq(w, b) for b in basis):
                    continue
                nxt[w] = None
                explored += 1
                if explored > max_candidates:
                    raise DiophantineLimit(
                        f"Diophantine search exceeds {max_candidates} candidates")
        frontier = [w for w in nxt if not any(_geq(w, b) for b in basis)]
    basis.sort(key=lambda v: (sum(v), tuple(-x for x in v)))
    return basis


def solve_ac_equation(left: Sequence[int], right: Sequence[int], **caps) -> list[tuple[int, ...]]:
    """Basis of ``sum(left[i] * x_i) == sum(right[j] * y_j)``.

    Returned vectors list the ``x`` components followed by the ``y`` components.
    """
    row = [*left, *(-b for b in right)]
    return hilbert_basis([row], **caps)

