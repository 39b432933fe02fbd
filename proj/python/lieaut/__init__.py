"""Numerical toolkit for group actions on complex domains.

Thin wrapper over the C++ core: Moebius actions on the upper half-plane,
branch-tracked covering lifts, Heisenberg-quotient domains, and the
Monte-Carlo verification suites.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from . import _core as _c

__version__ = _c.__version__


def run_suite(name, **kwargs):
    """Run a verification suite and return the report bundle as a dict.

    Supported names: "lemma", "claim", "winding", "heisenberg".
    """
    runners = {
        "lemma": _c.run_lemma,
        "claim": _c.run_claim,
        "winding": _c.run_winding,
        "heisenberg": _c.run_heisenberg,
    }
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(runners)}")
    return _json.loads(runners[name](**kwargs))
