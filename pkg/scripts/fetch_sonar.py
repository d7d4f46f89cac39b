"""Download and validate the sonar benchmark CSV (208 samples, 60
features, labels R/M) used by the end-to-end acceptance check.

The file is fetched from the UCI repository with a fallback mirror,
checked for the exact canonical shape and class counts, and written
verbatim (no header; the label is column index 60). Network access is
required; nothing else in the package needs it.

Usage::

    python3 scripts/fetch_sonar.py [--out data/sonar.csv]
"""

import argparse
import sys
import urllib.error
import urllib.request
from pathlib import Path

URLS = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/"
    "undocumented/connectionist-bench/sonar/sonar.all-data",
    "https://raw.githubusercontent.com/jbrownlee/Datasets/master/"
    "sonar.csv",
)

N_SAMPLES = 208
N_FEATURES = 60
CLASS_COUNTS = {"R": 97, "M": 111}


def validate(text):
    """Return the canonical data rows or raise ValueError."""
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    if rows and not _is_data_row(rows[0]):
        rows = rows[1:]  # tolerate a mirror-added header line
    if len(rows) != N_SAMPLES:
        raise ValueError("expected %d data rows, got %d"
                         % (N_SAMPLES, len(rows)))
    counts = {"R": 0, "M": 0}
    for i, row in enumerate(rows):
        cells = row.split(",")
        if len(cells) != N_FEATURES + 1:
            raise ValueError("row %d has %d columns, expected %d"
                             % (i + 1, len(cells), N_FEATURES + 1))
        for cell in cells[:-1]:
            float(cell)
        label = cells[-1].strip()
        if label not in counts:
            raise ValueError("row %d has label %r, expected R or M"
                             % (i + 1, label))
        counts[label] += 1
    if counts != CLASS_COUNTS:
        raise ValueError("class counts %s do not match the canonical %s"
                         % (counts, CLASS_COUNTS))
    return rows


def _is_data_row(row):
    try:
        float(row.split(",", 1)[0])
    except ValueError:
        return False
    return True


def fetch(url, timeout):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read().decode("utf-8", errors="strict")


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="fetch the sonar benchmark CSV")
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parents[1]
                    / "data" / "sonar.csv"))
    parser.add_argument("--timeout", type=float, default=60.0)
    args = parser.parse_args(argv)

    rows = None
    for url in URLS:
        print("fetching %s" % url)
        try:
            rows = validate(fetch(url, args.timeout))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            print("  failed: %s" % exc, file=sys.stderr)
            continue
        break
    if rows is None:
        print("could not fetch a valid sonar CSV from any source",
              file=sys.stderr)
        return 1

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print("wrote %s (%d rows, %d feature columns, labels R/M)"
          % (out, N_SAMPLES, N_FEATURES))
    return 0


if __name__ == "__main__":
    sys.exit(main())
