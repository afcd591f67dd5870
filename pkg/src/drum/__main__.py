import sys

from drum.cli import main

sys.exit(main())
