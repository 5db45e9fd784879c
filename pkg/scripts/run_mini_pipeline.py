#!/usr/bin/env python3
"""Run the bundled mini fixture through the full pipeline and print the report.

Writes artifacts to ./out-mini; rerunning with the same seed reproduces
report.json byte for byte.
"""

import json
from pathlib import Path

from reviewminer.pipeline import load_config, run_pipeline

ROOT = Path(__file__).resolve().parent.parent


def main():
    cfg = load_config(ROOT / "tests" / "fixtures" / "mini" / "pipeline.json",
                      out_dir=ROOT / "out-mini")
    report_path = run_pipeline(cfg)
    report = json.loads(report_path.read_text(encoding="utf-8"))
    print(f"report: {report_path}")
    print(f"config hash: {report['metadata']['config_hash'][:16]}…  seed: {report['metadata']['seed']}")
    for row in report["sections"]["overall_sentiment"]["overall"]:
        print(f"  {row['corpus']}: OS {row['os']:.4f} ({row['pos']}/{row['pos'] + row['neg']} positive)")
    for row in report["sections"]["brand_preference"]:
        print(f"  {row['corpus']} / {row['category']}: prefers {row['choice']}")
    for row in report["sections"]["entropy"]:
        print(
            f"  {row['corpus']} / {row['category']}: "
            f"E_fre {row['frequent_entropy']:.4f}  E_pop {row['popular_entropy']:.4f}"
        )
    print(f"see also: {report_path.parent / 'report.md'}")


if __name__ == "__main__":
    main()
