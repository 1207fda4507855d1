import sys

from hypbilliard.cli import main

sys.exit(main())
