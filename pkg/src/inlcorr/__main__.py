import sys

from inlcorr.cli import main

sys.exit(main())
