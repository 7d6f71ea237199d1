"""Regenerating-code tools for clustered storage: exact tradeoffs, code
constructions, opportunistic repair and reliability models.

Rationals cross the boundary as :class:`fractions.Fraction`; inputs may also
be ints or strings such as ``"2/5"``.
"""

from ._hierstore import *  # noqa: F401,F403
from ._hierstore import __version__  # noqa: F401
