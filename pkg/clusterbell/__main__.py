"""`python -m clusterbell` entry point."""
import os

os.environ.setdefault("OMP_NUM_THREADS", "1")

from clusterbell.app import main as app_main


def main() -> int:
    return app_main()


if __name__ == "__main__":
    raise SystemExit(main())
