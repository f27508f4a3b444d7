"""Allow ``python -m granet`` as an alias for the console script."""

import sys

from granet.cli import main

if __name__ == "__main__":
    sys.exit(main())
