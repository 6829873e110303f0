"""Process-wide defaults.

``CROSS_CHECK`` controls whether window-dependent decisions are repeated
at the larger level 2w+4; the test suite turns it on globally.
"""

import os

CROSS_CHECK = False
CATALOG_LIMIT = 2 ** 16


def env_window():
    v = os.environ.get("PKIT_WINDOW")
    if v is None or v == "":
        return None
    return int(v)


def resolve_cross_check(flag):
    return CROSS_CHECK if flag is None else bool(flag)
