"""Diagonal stability analysis for discrete-time positive switched systems with delay.

Thin wrapper over the C++ core: system/certificate documents travel as JSON,
so every function here accepts either a dict or an already-serialized string
and returns plain Python objects.
"""

import json
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from . import _core

__version__ = _core.version()

SystemLike = Union[str, Dict[str, Any]]


def _as_json(document: SystemLike) -> str:
    if isinstance(document, str):
        return document
    return json.dumps(document)


def benchmark_system(a: float, model: str = "persidskii") -> Dict[str, Any]:
    """The built-in two-mode benchmark family at parameter a."""
    return json.loads(_core.benchmark_system_json(float(a), model))


def analyze(system: SystemLike, tol: float = 1e-9) -> Dict[str, Any]:
    """Run every applicable stability checker; returns the report document."""
    return json.loads(_core.analyze_json(_as_json(system), tol))


def certify(system: SystemLike, tol: float = 1e-9) -> List[Dict[str, Any]]:
    """Synthesize certificates for every checker that holds."""
    return json.loads(_core.certify_json(_as_json(system), tol))["certificates"]


def verify(certificate: SystemLike, system: SystemLike) -> Dict[str, Any]:
    """Re-check a certificate (or bundle) against a system."""
    return json.loads(_core.verify_json(_as_json(certificate), _as_json(system)))


def spectral(system: SystemLike, tol: float = 1e-9) -> Dict[str, Any]:
    """Row-selection spectral radii of both matrix families."""
    return json.loads(_core.spectral_json(_as_json(system), tol))


def simulate_csv(
    system: SystemLike,
    steps: int = 100,
    seed: int = 0,
    f: str = "identity",
    switching: str = "random",
    input: str = "zero",
    certificate: Optional[SystemLike] = None,
    init: Sequence[float] = (),
) -> str:
    """Simulate and return the trajectory as CSV text."""
    cert_json = "" if certificate is None else _as_json(certificate)
    return _core.simulate_csv(
        _as_json(system), steps, seed, f, switching, input, cert_json, list(init)
    )


def spectral_radius(matrix: Sequence[Sequence[float]], tol: float = 1e-10) -> float:
    """Spectral radius of a nonnegative square matrix."""
    return _core.spectral_radius([list(row) for row in matrix], tol)


def minimal_scaling(
    members: Sequence[Sequence[Sequence[float]]], tol: float = 1e-9
) -> Tuple[float, List[float], float]:
    """Smallest strictly feasible scaling of a matrix family: (lambda, v, slack)."""
    return _core.minimal_scaling([[list(r) for r in m] for m in members], tol)


def row_selection(
    members: Sequence[Sequence[Sequence[float]]],
) -> Tuple[float, List[int], int]:
    """Exhaustive row-selection maximum: (rho_max, 1-based argmax, count)."""
    return _core.row_selection([[list(r) for r in m] for m in members])


__all__ = [
    "__version__",
    "analyze",
    "benchmark_system",
    "certify",
    "minimal_scaling",
    "row_selection",
    "simulate_csv",
    "spectral",
    "spectral_radius",
    "verify",
]
