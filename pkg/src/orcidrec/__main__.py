"""Allow `python -m orcidrec ...`."""

import sys

from .cli import main

sys.exit(main())
