import sys

from ruo.cli import main

sys.exit(main())
