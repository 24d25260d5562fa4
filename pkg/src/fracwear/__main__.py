from __future__ import annotations

import sys

from fracwear.cli import main

sys.exit(main())
