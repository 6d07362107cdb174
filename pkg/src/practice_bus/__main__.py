import sys

from practice_bus.cli import main

sys.exit(main())
