from .src import *  # noqa: F403
from .src import __all__
