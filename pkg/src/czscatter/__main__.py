"""python -m czscatter entry point."""
from czscatter.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
