#!/usr/bin/env python3
"""
Run the shipped scenario corpus once and freeze the outcomes.

Why?
    • The integration tests compare against recorded verdicts instead of
      re-deriving expectations by hand.
    • Regenerate only when a scenario or an algorithm changes on purpose.

Outputs
-------
One report per scenario in --out-dir (default tests/fixtures/golden/, named by
report_filename), and, with --update-fixture, a refreshed tests/fixtures/expected_verdicts.json:
{
  "kahler_baseline": {
        "verdict": "pass",
        "tasks":   12,
        "results": { "9": {"residual_zero_through": 3, ...} }
  },
  ...
}
Recorded "results" subsets are kept; their values are refreshed from the run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

# Add the parent directory to sys.path to make genkahler importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from typing import Any, Dict

from genkahler.cli.commands import report_filename, report_json, run_scenario
from genkahler.core.models import Report, RunSettings
from genkahler.data.corpus import Corpus
from genkahler.main import setup_logging

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "expected_verdicts.json"
GOLDEN_DIR = FIXTURE.parent / "golden"


# ---------- helpers ---------------------------------------------------------

def fixture_entry(report: Report, previous: Dict[str, Any] | None) -> Dict[str, Any]:
    """Verdict, task count and the previously recorded result keys."""
    results: Dict[str, Any] = {}
    for index, keys in (previous or {}).get("results", {}).items():
        result = report.tasks[int(index)].result
        results[index] = {key: result.get(key) for key in keys}
    return {"verdict": report.verdict, "tasks": len(report.tasks), "results": results}


# ---------- CLI -------------------------------------------------------------

def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(
        description="Run the genkahler corpus and write golden reports."
    )
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=GOLDEN_DIR,
        help="Directory for the JSON reports (created if missing).",
    )
    parser.add_argument(
        "--scenario",
        action="append",
        help="Corpus name to run; repeat for several (default: all).",
    )
    parser.add_argument(
        "--update-fixture",
        action="store_true",
        help=f"Refresh {FIXTURE.name} from the run.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")

    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    corpus = Corpus()
    names = args.scenario or corpus.names()
    unknown = sorted(set(names) - set(corpus.names()))
    if unknown:
        parser.error(f"Unknown scenarios: {', '.join(unknown)}")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    fixture = json.loads(FIXTURE.read_text(encoding="utf-8")) if FIXTURE.exists() else {}

    for name in names:
        scenario = corpus.load(name)
        print(f"[•] Running {name} ({len(scenario.tasks)} tasks) …")
        report = run_scenario(scenario, RunSettings.for_scenario(scenario))
        out = args.out_dir / report_filename(scenario.name)
        out.write_text(report_json(report), encoding="utf-8")
        print(f"[✓] {name}: {report.verdict} → {out}")
        fixture[name] = fixture_entry(report, fixture.get(name))

    if args.update_fixture:
        FIXTURE.parent.mkdir(parents=True, exist_ok=True)
        FIXTURE.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"[✓] Fixture written → {FIXTURE}")


if __name__ == "__main__":
    main()
