"""Canonical JSON: sorted keys, UTF-8, no insignificant whitespace.

Used everywhere bytes must be stable — API bodies, CLI --json output,
bundle config.json — so differential and golden tests can compare
byte-for-byte.
"""

from __future__ import annotations

import json


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )
