"""``python -m ppcalc``"""
from ppcalc.cli import main

if __name__ == "__main__":
    main()
