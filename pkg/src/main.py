#!/usr/bin/env python3
"""
Lucas-Lehmer Polynomial Toolkit - Main Entry Point
"""

import os
import signal
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli import run


def signal_handler(signum, frame):
    """Handle interrupt during long enumerations"""
    print(f"\nReceived signal {signum}, stopping...", file=sys.stderr)
    sys.exit(130)


if __name__ == "__main__":
    signal.signal(signal.SIGINT, signal_handler)
    sys.exit(run(sys.argv[1:]))
