"""Certified isolation of the real roots of square polynomial systems.

The pipeline combines a total-degree homotopy tracker (approximate complex
zeros), Kantorovich-style initial boxes around each candidate, and Krawczyk
interval verification that certifies existence and uniqueness per box.

Quick start::

    from isolat import parse_system, real_root_isolate

    system = parse_system("x^2 + y^2 - 4\\nx*y - 1\\n")
    report = real_root_isolate(system)
    for cert in report.certificates:
        print(cert.box)
"""

from .certify import (
    CertificationError,
    KantorovichData,
    empirical_radius,
    init_width,
    iscomplex,
)
from .homotopy import (
    ApproxZero,
    RootsFileError,
    TrackerConfig,
    load_zeros,
    solve_all,
    total_degree_start,
    track_path,
)
from .interval import (
    Box,
    Interval,
    IntervalDivisionError,
    IntervalMatrix,
    SingularMatrixError,
    eval_interval,
    eval_jacobian_interval,
    format_endpoint,
)
from .isolate import (
    IsolationReport,
    disjoint_process,
    narrowing,
    real_root_isolate,
)
from .krawczyk import (
    BisectionBudget,
    Certificate,
    VerifyResult,
    VerifyStatus,
    krawczyk_image,
    krawczyk_verify,
)
from .parser import ParseError, UnknownIdentifierError, parse_polynomial, parse_system
from .poly import (
    EvaluationError,
    Monomial,
    NonSquareSystemError,
    Polynomial,
    PolySystem,
)
from .report import render_json, render_text

__version__ = "0.1.0"

__all__ = [
    "ApproxZero",
    "BisectionBudget",
    "Box",
    "Certificate",
    "CertificationError",
    "EvaluationError",
    "Interval",
    "IntervalDivisionError",
    "IntervalMatrix",
    "IsolationReport",
    "KantorovichData",
    "Monomial",
    "NonSquareSystemError",
    "ParseError",
    "PolySystem",
    "Polynomial",
    "RootsFileError",
    "SingularMatrixError",
    "TrackerConfig",
    "UnknownIdentifierError",
    "VerifyResult",
    "VerifyStatus",
    "disjoint_process",
    "empirical_radius",
    "eval_interval",
    "eval_jacobian_interval",
    "format_endpoint",
    "init_width",
    "iscomplex",
    "krawczyk_image",
    "krawczyk_verify",
    "load_zeros",
    "narrowing",
    "parse_polynomial",
    "parse_system",
    "real_root_isolate",
    "render_json",
    "render_text",
    "solve_all",
    "total_degree_start",
    "track_path",
    "__version__",
]
