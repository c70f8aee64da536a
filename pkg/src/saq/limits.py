"""Resource caps guarding exponential operations.

Defaults can be overridden through the ``SAQ_LIMITS`` environment variable,
a list of ``name=value`` pairs separated by commas or whitespace, e.g.
``SAQ_LIMITS="term_limit=5000,clause_limit=100"``.
"""

import os
import re

from .errors import ParseError

DEFAULTS = {
    "term_limit": 10**6,
    "clause_limit": 10**4,
    "grid_cap": 10**7,
    "subset_cap": 20,
}


def current_limits(env=None):
    """Return the active caps, applying ``SAQ_LIMITS`` overrides."""
    limits = dict(DEFAULTS)
    raw = (os.environ if env is None else env).get("SAQ_LIMITS", "")
    for pair in filter(None, re.split(r"[,\s]+", raw.strip())):
        name, sep, value = pair.partition("=")
        if not sep or name not in limits:
            raise ParseError(f"bad SAQ_LIMITS entry {pair!r}")
        try:
            limits[name] = int(value)
        except ValueError:
            raise ParseError(f"bad SAQ_LIMITS value {pair!r}") from None
        if limits[name] <= 0:
            raise ParseError(f"SAQ_LIMITS value must be positive: {pair!r}")
    return limits


def limit(name):
    return current_limits()[name]
