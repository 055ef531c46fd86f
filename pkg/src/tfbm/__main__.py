import sys

from tfbm.cli import main

sys.exit(main())
