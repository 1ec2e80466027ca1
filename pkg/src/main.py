"""Main entry point for the wave-isp command."""
import sys

from .cli.app import main as run


def main():
    """Run the command line and exit with its status."""
    sys.exit(run())


if __name__ == "__main__":
    main()
