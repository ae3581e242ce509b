#!/usr/bin/env python3
"""Run the shipped verification suites on both backends."""

import sys

from qeuclid.cli import main


if __name__ == "__main__":
    code = main(["verify", "--backend", "moyal", "--out", "verify-moyal"])
    code_cls = main(["verify", "--backend", "classical", "--out", "verify-classical"])
    sys.exit(max(code, code_cls))
