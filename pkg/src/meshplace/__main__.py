import sys

from meshplace.cli import main

sys.exit(main())
