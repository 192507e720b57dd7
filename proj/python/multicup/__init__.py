"""Multi-cup suction grasp planning.

The heavy lifting lives in the compiled extension; this package re-exports
its entry points.
"""

from multicup._core import (
    plan,
    preset_names,
    render_preset,
    run_cli,
    validate_random,
)

__all__ = [
    "plan",
    "preset_names",
    "render_preset",
    "run_cli",
    "validate_random",
]
