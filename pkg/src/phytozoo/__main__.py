import sys

from phytozoo.cli import main

sys.exit(main())
