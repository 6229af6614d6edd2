import sys

from tenzo.cli import main

sys.exit(main())
