"""Print one PASS/FAIL line per acceptance criterion; exit status 1 if any fail."""
import runpy
import sys
from pathlib import Path

if __name__ == "__main__":
    suite = runpy.run_path(str(Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"))
    sys.exit(suite["main"]())
