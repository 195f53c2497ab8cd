import sys

from mlsynth.cli import main

sys.exit(main())
