import sys

from confstab.cli import main

sys.exit(main())
