import sys

from uiverify.cli import main

sys.exit(main())
