"""Patient PK/PD model and time-optimal propofol induction solvers."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
