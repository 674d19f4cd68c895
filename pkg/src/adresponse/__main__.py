"""Module entry point: `python -m adresponse ...`."""
import sys

from .cli import main

sys.exit(main())
