#!/usr/bin/env python
# Simple startup script for SyndromEst
"""SyndromEst launcher script.

Runs the command-line interface from a source checkout without
installing the package, for example::

    python run.py estimate --profile desk --seed 7

"""

import sys

from syndromest.infer import chunking
from syndromest.io import cli


def main():
    """Launch the command-line interface and exit with its code."""
    chunking.set_mp_start_method()
    sys.exit(cli.main())


if __name__ == "__main__":
    print("Starting SyndromEst run script...")
    main()
