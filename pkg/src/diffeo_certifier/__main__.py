import sys

from diffeo_certifier.cli import main

sys.exit(main())
