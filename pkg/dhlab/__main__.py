import sys

from dhlab.cli import main

sys.exit(main())
