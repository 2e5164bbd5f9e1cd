"""模型集合。"""

from .problem_spec import FixedPointEntry, PolytopeEntry, ProblemSpec

__all__ = ["FixedPointEntry", "PolytopeEntry", "ProblemSpec"]
