"""Exercise the finite-difference gradient oracle.

Runs a reduced grid (40 cases per cell instead of the acceptance suite's
200) and prints the worst relative error per cell, then deliberately
corrupts one cell's analytic gradient to show the harness catches it.
"""

from evidkit import run_grid


def print_table(results) -> None:
    print(f"  {'cell':<34} {'status':<7} {'max_rel_err':>12}")
    for cell in results:
        status = "ok" if cell.passed else "FAIL"
        print(f"  {cell.name:<34} {status:<7} {cell.max_err:>12.3e}")


def main() -> None:
    print("Full grid, 40 random cases per cell (K in {2, 3, 5, 10}):\n")
    results = run_grid(n_cases=40)
    print_table(results)
    worst = max(results, key=lambda c: c.max_err)
    print(f"\nworst cell overall: {worst.name} at {worst.max_err:.3e} (tolerance 1e-4)")

    print("\nSelf-test: corrupt ev_ce:exp:edl_kl by adding 1e-2 to one coordinate...")
    corrupted = run_grid(
        losses=None, acts=None, regs=None, n_cases=10, corrupt="ev_ce:exp:edl_kl"
    )
    bad = [c for c in corrupted if not c.passed]
    print(f"cells flagged: {[c.name for c in bad]}")
    assert bad and all(c.name == "ev_ce:exp:edl_kl" for c in bad)
    print("the corrupted cell fails, every other cell still passes.")


if __name__ == "__main__":
    main()
