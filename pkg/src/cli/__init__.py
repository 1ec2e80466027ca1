"""Command-line front end: run configurations, CSV tables and SVG figures."""
from .app import build_parser, main
from .commands import COMMANDS, CommandExecutor, CommandSpec

__all__ = ["COMMANDS", "CommandExecutor", "CommandSpec", "build_parser", "main"]
