import sys

from appsent.cli import main

sys.exit(main())
