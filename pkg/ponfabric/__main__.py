import sys

from ponfabric.main import main

sys.exit(main())
