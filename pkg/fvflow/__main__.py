import sys

from fvflow.cli import main

sys.exit(main())
