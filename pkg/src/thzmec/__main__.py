import sys

from thzmec.cli import main

sys.exit(main())
