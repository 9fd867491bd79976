"""Main entry point for running the simulator."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
