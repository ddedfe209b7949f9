import sys

from floqlat.cli import main

sys.exit(main())
