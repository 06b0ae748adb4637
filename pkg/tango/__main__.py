import sys

from tango.main import main

sys.exit(main())
