# Command-line front end: `python -m src.cli <command> ...` from scripts/
