import sys

from condcoding.cli import main

sys.exit(main())
