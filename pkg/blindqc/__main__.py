import sys

from blindqc.cli import main

sys.exit(main())
