"""
Bundled example queries and instances.

Queries: ``qa_triangle`` (Oscar winners married to the director),
``q_triangle`` (the same without ``Oscar``), ``chain2`` and ``epath`` (a
self-join). Data: ``mcdormand``, ``mcdormand_bag`` (``Oscar`` tuple with
multiplicity 2) and ``ecycle`` (a directed 3-cycle for ``epath``).
"""

from pathlib import Path
from typing import Optional

from ..instance import Instance, Semantics, load_instance
from ..qlang import Query, load_query

__all__ = ("query_path", "data_path", "load", "QUERIES", "DATASETS")

ROOT = Path(__file__).parent
QUERIES = ("qa_triangle", "q_triangle", "chain2", "epath")
DATASETS = ("mcdormand", "mcdormand_bag", "ecycle")


def query_path(name: str) -> Path:
    if name not in QUERIES:
        raise KeyError(f"Unknown bundled query {name!r}, choose from {', '.join(QUERIES)}")
    return ROOT / "queries" / f"{name}.dl"


def data_path(name: str) -> Path:
    if name not in DATASETS:
        raise KeyError(f"Unknown bundled dataset {name!r}, choose from {', '.join(DATASETS)}")
    return ROOT / "data" / name


def load(
    query: str, data: Optional[str] = None, semantics: Optional[Semantics] = None
) -> tuple[Query, Optional[Instance]]:
    """Load a bundled query and, optionally, a bundled instance restricted to
    the query's relations. ``mcdormand_bag`` defaults to bag semantics."""
    q = load_query(query_path(query))
    if data is None:
        return q, None
    semantics = semantics or ("bag" if data.endswith("_bag") else "set")
    return q, load_instance(data_path(data), semantics, query=q)
