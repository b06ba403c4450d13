"""Entry point for python -m bulktx."""

import sys

from bulktx.cli import main

if __name__ == "__main__":
    sys.exit(main())
