"""The projection φ_d onto Γ and branch classification of plane points."""

import math
from typing import Optional, Tuple

import numpy as np

from ..models.points import Branch, NetworkPoint, PlanePoint

# Branch codes used by the vectorized projection.
BRANCH_CODES = (Branch.O, Branch.E, Branch.N, Branch.W, Branch.S)


def project_to_network(p: PlanePoint) -> NetworkPoint:
    """Closed-form limit of the gradient flow of d started at p.

    Z₂² − Z₁² is conserved along the flow, so the limit sits on the N/S axis
    at radius √(x₂²−x₁²) when |x₂| > |x₁| and on E/W otherwise. The diagonal
    |x₁| = |x₂| maps to O, compared exactly.
    """
    x1, x2 = p.x1, p.x2
    a1, a2 = abs(x1), abs(x2)
    if a1 == a2:
        return NetworkPoint.junction()
    if a2 > a1:
        branch = Branch.N if x2 > 0 else Branch.S
        radius = math.sqrt((a2 - a1) * (a2 + a1))
    else:
        branch = Branch.E if x1 > 0 else Branch.W
        radius = math.sqrt((a1 - a2) * (a1 + a2))
    return NetworkPoint.on(branch, radius)


def project_array(xy: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized φ_d: branch codes (index into BRANCH_CODES) and radii."""
    xy = np.asarray(xy, dtype=float)
    x1, x2 = xy[..., 0], xy[..., 1]
    a1, a2 = np.abs(x1), np.abs(x2)
    radius = np.sqrt(np.abs((a2 - a1) * (a2 + a1)))
    vertical = a2 > a1
    codes = np.where(
        vertical, np.where(x2 > 0, 2, 4), np.where(x1 > 0, 1, 3)
    ).astype(int)
    codes = np.where((a1 == a2) | (radius == 0), 0, codes)
    radius = np.where(codes == 0, 0.0, radius)
    return codes, radius


def projected_plane(xy: np.ndarray) -> np.ndarray:
    """φ_d as points of ℝ², shape (..., 2)."""
    codes, radius = project_array(xy)
    directions = np.array([b.direction for b in BRANCH_CODES])
    return directions[codes] * radius[..., None]


def classify_branch(p: PlanePoint, tol: float = 1e-9) -> Optional[Branch]:
    """Branch containing p up to an off-axis tolerance, or None when off Γ."""
    a1, a2 = abs(p.x1), abs(p.x2)
    if a1 <= tol and a2 <= tol:
        return Branch.O
    if a1 <= tol:
        return Branch.N if p.x2 > 0 else Branch.S
    if a2 <= tol:
        return Branch.E if p.x1 > 0 else Branch.W
    return None


def dominant_branch(xy, junction_tol: float = 0.0) -> Branch:
    """Branch of the dominant coordinate; O inside the junction box."""
    x1, x2 = float(xy[0]), float(xy[1])
    if max(abs(x1), abs(x2)) <= junction_tol:
        return Branch.O
    if abs(x2) >= abs(x1):
        return Branch.N if x2 > 0 else Branch.S
    return Branch.E if x1 > 0 else Branch.W


def network_distance(a: NetworkPoint, b: NetworkPoint) -> float:
    return a.distance(b)


def holder_ratio(first: np.ndarray, second: np.ndarray) -> float:
    """max |φ_d(x) − φ_d(y)| / |x − y|^(1/2) over paired rows."""
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    gap = np.linalg.norm(projected_plane(first) - projected_plane(second), axis=-1)
    dist = np.linalg.norm(first - second, axis=-1)
    mask = dist > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(gap[mask] / np.sqrt(dist[mask])))
