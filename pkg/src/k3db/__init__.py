"""Hilbert series, baskets and weighted projective candidates for K3 surfaces and Fano 3-folds."""

from .basket import Basket, QuotientSingularity, enumerate_fano_baskets, enumerate_k3_baskets, parse_basket
from .candidates import CandidateRecord, NoCandidate, deduce_weights, format_record, make_candidate
from .db import Database, build, compute_centres, load, save, search
from .projection import project_type1, projection_chains, verify_projection
from .qseries import HilbertExpr, NotPolynomial, Poly, clear_denominator
from .rr import degree, hilbert, lattice_oracle, plurigenera

__version__ = "0.1.0"

__all__ = [
    "Basket",
    "QuotientSingularity",
    "enumerate_fano_baskets",
    "enumerate_k3_baskets",
    "parse_basket",
    "CandidateRecord",
    "NoCandidate",
    "deduce_weights",
    "format_record",
    "make_candidate",
    "Database",
    "build",
    "compute_centres",
    "load",
    "save",
    "search",
    "project_type1",
    "projection_chains",
    "verify_projection",
    "HilbertExpr",
    "NotPolynomial",
    "Poly",
    "clear_denominator",
    "degree",
    "hilbert",
    "lattice_oracle",
    "plurigenera",
]
