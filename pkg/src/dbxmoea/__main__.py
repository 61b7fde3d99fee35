import sys

from dbxmoea.cli import main

sys.exit(main())
