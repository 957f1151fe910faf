#!/usr/bin/env python3
"""Run every randomized verification suite and write the canonical report.

The suites use fixed seeds, so the written file is byte-identical across
runs; a second invocation is compared against the first as a self-check.
"""

import sys
from pathlib import Path

from semistatic.scenario import canonical_json
from semistatic.verify import suite_all


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("verify_report.json")
    report = suite_all()
    text = canonical_json(report)
    out.write_text(text)
    again = canonical_json(suite_all())
    deterministic = again == text
    for name, sub in report["results"].items():
        print(f"{name}: {'ok' if sub['ok'] else 'FAILED'} ({sub.get('checks', '?')} checks)")
    print(f"deterministic: {deterministic}")
    print(f"report written to {out}")
    return 0 if report["ok"] and deterministic else 1


if __name__ == "__main__":
    raise SystemExit(main())
