import sys

from statsad.cli import main

sys.exit(main())
