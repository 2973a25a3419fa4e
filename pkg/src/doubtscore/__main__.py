import sys

from doubtscore.cli import main

sys.exit(main())
