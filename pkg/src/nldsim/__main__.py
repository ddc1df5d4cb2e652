import sys

from nldsim.cli import main

sys.exit(main())
