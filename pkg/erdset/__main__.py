"""Allow ``python -m erdset``."""

import sys

from erdset.main import main

sys.exit(main())
