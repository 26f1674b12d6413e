"""Adaptive Simpson quadrature for smooth scalar integrands."""

from __future__ import annotations

from typing import Callable

DEFAULT_ABS_TOL = 1e-10
MAX_DEPTH = 50


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     abs_tol: float = DEFAULT_ABS_TOL, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``f`` over ``[a, b]`` to roughly ``abs_tol``.

    Uses the classical Richardson-corrected Simpson recursion with an explicit
    stack. The tolerance is split between halves at each level.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, abs_tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        # depth >= 2 guards against a lucky agreement on the first split
        if depth >= 2 and (abs(delta) <= 15.0 * tol or depth >= max_depth):
            total += left + right + delta / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
    return total
