"""Run the step-by-step derivation for both flavors and print every constraint."""
import argparse
import time

from ebequiv.derivation import derive_classic, verify_theorem2_generalized
from ebequiv.textio import to_text


def show(trace, title):
    print(f"== {title}")
    for s in trace.steps:
        print(f"[{s.verdict}] {s.name}")
        if s.reference is not None:
            print(f"    reference: {to_text(s.reference)}")
            print(f"    factor:    {to_text(s.factor) if s.factor is not None else '-'}")
        if s.solved:
            print(f"    solved:    {s.solved}")
        for name, ok in s.checks.items():
            print(f"    {name}: {ok}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--flavor", choices=("classic", "generalized", "both"), default="both")
    args = ap.parse_args()
    if args.flavor in ("classic", "both"):
        start = time.perf_counter()
        trace = derive_classic()
        show(trace, f"classic ({time.perf_counter() - start:.1f} s)")
        print(f"consistent: {trace.consistent()}")
    if args.flavor in ("generalized", "both"):
        start = time.perf_counter()
        show(verify_theorem2_generalized(), f"generalized ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
