"""k-center approximations that anchor the largest-radius grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constraints import ColorTable, ConstraintSpec, Kind
from .geometry import UsageError, as_points


@dataclass(frozen=True)
class KCenterResult:
    centers: tuple[int, ...]  # indices into the input points
    value: float
    factor: float


def gonzalez(P, k: int) -> KCenterResult:
    """Farthest-first traversal from the first input point (a 2-approximation).

    Ties go to the lowest input index. Stops early once every point is a
    center's duplicate, so fewer than k centers may be returned.
    """
    pts = as_points(P)
    if len(pts) == 0:
        raise UsageError("gonzalez needs a nonempty point set")
    if k < 1:
        raise UsageError("k must be positive")
    centers = [0]
    near = np.sqrt(np.sum((pts - pts[0]) ** 2, axis=1))
    while len(centers) < k:
        nxt = int(np.argmax(near))
        if near[nxt] == 0.0:
            break
        centers.append(nxt)
        near = np.minimum(near, np.sqrt(np.sum((pts - pts[nxt]) ** 2, axis=1)))
    return KCenterResult(tuple(centers), float(near.max()), 2.0)


KCenterFn = Callable[[np.ndarray, int, "ColorTable | None", ConstraintSpec], KCenterResult]

_REGISTRY: dict[Kind, KCenterFn] = {}


def register_kcenter(kind: Kind, fn: KCenterFn) -> None:
    """Register a constant-factor k-center approximation for a constraint kind."""
    _REGISTRY[Kind(kind)] = fn


def unregister_kcenter(kind: Kind) -> None:
    _REGISTRY.pop(Kind(kind), None)


def registered_kinds() -> frozenset[Kind]:
    return frozenset(_REGISTRY)


def constrained_kcenter_plugin(P, k: int, colors: ColorTable | None,
                               spec: ConstraintSpec) -> KCenterResult | None:
    """Dispatch to the registered approximation for ``spec.kind``; None if absent."""
    fn = _REGISTRY.get(spec.kind)
    if fn is None:
        return None
    res = fn(as_points(P), k, colors, spec)
    if res.factor < 1:
        raise UsageError(f"k-center plugin reported factor {res.factor} < 1")
    return res


register_kcenter(Kind.UNCONSTRAINED, lambda pts, k, colors, spec: gonzalez(pts, k))
