"""Allow ``python -m ipof``."""

import sys

from ipof.cli import main

if __name__ == "__main__":
    sys.exit(main())
