"""Entry point for `python -m regpart`."""

import sys

from .cli import main

sys.exit(main())
