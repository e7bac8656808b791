import sys

from flowspace.cli import main

sys.exit(main())
