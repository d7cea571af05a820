import sys

from foliation_forge.cli import main

sys.exit(main())
