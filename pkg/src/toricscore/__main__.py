import sys

from toricscore.cli import main

sys.exit(main())
