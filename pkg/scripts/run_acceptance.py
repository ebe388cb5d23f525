"""
Acceptance driver
Runs every acceptance check through the CLI entry point and prints a colored summary.
"""

import argparse
import os
import sys
import time
from pathlib import Path

from colorama import Fore, Style
from colorama import init as colorama_init

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.main import EXIT_OK, main as cli_main  # noqa: E402

QUICK = [
    ("galois", ["verify", "--suite", "galois", "--kmax", "100"]),
    ("conjugation", ["verify", "--suite", "conjugation", "--kmax", "50"]),
    ("pf-constants", ["verify", "--suite", "pf", "--pf-limit", "40"]),
    ("column-growth", ["verify", "--suite", "column-growth", "--samples", "1000"]),
    ("steinberg", ["verify", "--suite", "steinberg,commutators"]),
    ("periodic-spectrum", ["lyapunov", "--dist", "periodic", "--pattern", "2", "--steps", "10000", "--samples", "1"]),
    ("periodic-gap", ["lyapunov", "--dist", "periodic", "--pattern", "2", "--steps", "10000", "--samples", "1", "--mode", "gap"]),
    ("area", ["verify", "--suite", "area,duality"]),
    ("minus-one", ["construct", "minus-one", "--blocks", "8", "--points", "10000"]),
    ("irrational", ["construct", "irrational", "--blocks", "3", "--points", "10000"]),
    ("classify-bt", ["classify", "--alpha", "2/3", "--beta", "1/3"]),
    ("hypotheses", ["verify", "--suite", "hypotheses,cnorm-ratio", "--kmax", "1000"]),
]

FULL = [
    (f"second-exponent-d{d}", ["lyapunov", "--d", str(d), "--steps", "100000", "--samples", "20", "--mode", "second"])
    for d in (3, 4)
]


def print_header(text: str) -> None:
    print(f"\n{Fore.MAGENTA}{Style.BRIGHT}{'=' * 60}")
    print(text.center(60))
    print(f"{'=' * 60}{Style.RESET_ALL}\n")


def print_success(text: str) -> None:
    print(f"{Fore.GREEN}[+] {text}{Style.RESET_ALL}")


def print_error(text: str) -> None:
    print(f"{Fore.RED}[!] {text}{Style.RESET_ALL}")


def print_info(text: str) -> None:
    print(f"{Fore.CYAN}[>] {text}{Style.RESET_ALL}")


def run_step(name: str, argv: list[str], out_dir: Path) -> bool:
    target = out_dir / f"{name}.json"
    start = time.perf_counter()
    code = cli_main(argv + ["--out", str(target)])
    elapsed = time.perf_counter() - start
    if code == EXIT_OK:
        print_success(f"{name} ({elapsed:.1f}s) -> {target}")
        return True
    print_error(f"{name} exited with {code} ({elapsed:.1f}s), see {target}")
    return False


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the acceptance checks")
    parser.add_argument("--out-dir", default=os.getenv("ITM_OUTPUT_DIR", "reports"))
    parser.add_argument("--full", action="store_true", help="include the Monte Carlo runs (minutes)")
    parser.add_argument("--only", default="", help="comma list of step names")
    args = parser.parse_args()

    colorama_init()
    steps = QUICK + (FULL if args.full else [])
    if args.only:
        wanted = {s.strip() for s in args.only.split(",") if s.strip()}
        steps = [s for s in steps if s[0] in wanted]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    print_header("ITM acceptance checks")
    print_info(f"Reports go to {out_dir}")

    failed = [name for name, argv in steps if not run_step(name, argv, out_dir)]
    print()
    if failed:
        print_error(f"{len(failed)} of {len(steps)} steps failed: {', '.join(failed)}")
        return 1
    print_success(f"All {len(steps)} steps passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
