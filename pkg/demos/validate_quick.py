"""Run the full certification suite at demonstration scale.

The real acceptance run uses 10^5 paths at dt = 1e-4 (see the README);
this uses 2000 paths at dt = 1e-3 so it finishes in seconds.  A few
Monte-Carlo rows can land outside their tolerance bands at this scale --
the point here is to show the report format, not to certify.
"""

from fellerbm.validation import SuiteConfig, run_suite


def main():
    config = SuiteConfig(suite="acceptance", n_paths=2_000, dt=1e-3,
                         master_seed=20260814)
    report = run_suite(config)
    print(report.table())


if __name__ == "__main__":
    main()
