"""命令行子命令。"""

from app.cli.commands import main

__all__ = ["main"]
