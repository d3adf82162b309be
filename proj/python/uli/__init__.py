"""Local unitary invariance of bipartite pure states."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import analyze_json as _analyze_json


def analyze(state, rank_tol=1e-10, degeneracy_tol=1e-8):
    """Structured analysis report (same schema as ``uli analyze --format json``)."""
    return _json.loads(_analyze_json(state, rank_tol, degeneracy_tol))
