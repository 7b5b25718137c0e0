from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, Iterable, Optional, Sequence
import csv
import io
import json
import math

import attrs

from src.utils.errors import EXIT_OK

TOOL_NAME = "primegap-toolkit"
TOOL_VERSION = "1.0.0"


@attrs.frozen
class CommandResult:
    """Rendered command output and the exit code it should end with."""

    body: str
    exit_code: int = EXIT_OK


def _clean(value: Any) -> Any:
    """Make a payload JSON-safe: non-finite floats become strings, tuples lists."""
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def render_json(data: Dict[str, Any]) -> str:
    return json.dumps(_clean(data), sort_keys=True, indent=2)


def create_response(data: Dict[str, Any], exit_code: int = EXIT_OK,
                    metadata: Optional[Dict[str, Any]] = None) -> CommandResult:
    """
    Standard JSON envelope. `data` is the deterministic payload; the run
    timestamp and tool version live under `metadata` only.
    """
    meta = {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "generatedAt": datetime.now(timezone.utc).isoformat(),
    }
    if metadata:
        meta.update(metadata)
    return CommandResult(render_json({"data": data, "metadata": meta}), exit_code)


def create_error_response(exit_code: int, message: str) -> CommandResult:
    """Standard error body, written to stderr by the CLI."""
    return CommandResult(
        render_json({"error": {"message": message, "exitCode": exit_code}}),
        exit_code,
    )


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def create_csv_response(header: Sequence[str], rows: Iterable[Sequence[Any]],
                        exit_code: int = EXIT_OK) -> CommandResult:
    """Tabular output; floats carry 17 significant digits so they read back exactly."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return CommandResult(buffer.getvalue().rstrip("\n"), exit_code)


def create_text_response(lines: Iterable[Any], exit_code: int = EXIT_OK) -> CommandResult:
    return CommandResult("\n".join(str(line) for line in lines), exit_code)
