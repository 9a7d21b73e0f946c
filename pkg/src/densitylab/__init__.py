"""Densities on decomposition systems, radical-inverse sequences and divisor counts."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .exact import *  # noqa: E402,F401,F403
from .semigroup import *  # noqa: E402,F401,F403
from .sets import *  # noqa: E402,F401,F403
from .radix import *  # noqa: E402,F401,F403
from .core import *  # noqa: E402,F401,F403
from .systems import *  # noqa: E402,F401,F403
from .maps import *  # noqa: E402,F401,F403
from .divisor import *  # noqa: E402,F401,F403
from .udtest import *  # noqa: E402,F401,F403
from .syntax import *  # noqa: E402,F401,F403
from .report import *  # noqa: E402,F401,F403
