"""Nonconforming mixed finite elements for linear elasticity on tetrahedra."""

from __future__ import annotations

import json

import numpy as np

from ._core import (
    DegenerateGeometry,
    Error,
    InvalidArgument,
    SolverFailure,
    box_mesh,
    cli,
    element_report,
    manufactured_cases,
    vertex_system_determinant,
    vertex_system_determinant_closed_form,
)
from . import _core

__all__ = [
    "DegenerateGeometry",
    "Error",
    "InvalidArgument",
    "SolverFailure",
    "box_mesh",
    "cli",
    "convergence",
    "element_report",
    "manufactured_cases",
    "solve",
    "verify",
    "vertex_system_determinant",
    "vertex_system_determinant_closed_form",
]


def convergence(case="sine", variant="full", levels=(2, 4, 8), lam=1.0, mu=1.0, solver="direct", tol=1e-10):
    """Convergence study on the unit cube; returns the report as a dict."""
    return json.loads(_core.convergence_json(case, variant, list(levels), lam, mu, solver, tol))


def solve(case="sine", n=4, variant="full", lam=1.0, mu=1.0, solver="direct", tol=1e-10):
    """Solve on the n x n x n mesh.

    Returns a dict with the one-level report, the global dof vectors and the
    discrete stress (xx, xy, xz, yy, yz, zz) and displacement at tet centroids.
    """
    r = _core.solve_level(case, n, variant, lam, mu, solver, tol)
    out = {k: np.asarray(v) for k, v in r.items() if k != "report"}
    out["report"] = json.loads(r["report"])
    return out


def verify(seed=20240601):
    """Runs the element and mesh property suite; returns a list of check dicts."""
    return _core.verification(seed)
