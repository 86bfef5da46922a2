import sys

from dpnalign.cli import main

sys.exit(main())
