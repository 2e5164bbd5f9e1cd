"""项目主启动入口（命令行）。"""

from __future__ import annotations

import logging

from app.cli import main
from app.config import LOG_LEVEL

logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.WARNING),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
)


if __name__ == "__main__":
    raise SystemExit(main())
