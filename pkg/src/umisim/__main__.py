import sys

from umisim.cli import main

sys.exit(main())
