"""集成测试 fixture。"""

from __future__ import annotations

from dataclasses import dataclass
import io
from typing import Callable

import pytest

from app.cli import main


@dataclass
class CliResult:
    code: int
    stdout: str
    stderr: str


@pytest.fixture
def run_cli() -> Callable[..., CliResult]:
    """在进程内执行命令行入口并收集输出。"""

    def _run(*argv: str, stdin: str = "") -> CliResult:
        out = io.StringIO()
        err = io.StringIO()
        code = main(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
        return CliResult(code=code, stdout=out.getvalue(), stderr=err.getvalue())

    return _run
