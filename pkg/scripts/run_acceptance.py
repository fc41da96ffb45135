"""Run the twelve acceptance criteria and print one line per criterion."""

import sys

from curvflow.acceptance import run_all

if __name__ == "__main__":
    sys.exit(0 if all(c.passed for c in run_all()) else 1)
