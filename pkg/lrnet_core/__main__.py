import sys

from lrnet_core.cli import main

sys.exit(main())
