import datetime
import os
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import src.config as config
from src.models.census import ADULT_SCHEMA, AttributeSpec, LabelSpec
from src.models.reports import RunManifest
from src.utils.data_utils import load_schema, resolve_data_paths
from src.utils.errors import CensusBoostError
from src.utils.io_utils import digests, write_json
from src.utils.logger import Logger

MANIFEST_FILE = "manifest.json"


class RunContext:
    """Output directory, log and manifest of one command invocation."""

    def __init__(self, command: str, out_dir: str):
        self.command = command
        self.out_dir = out_dir
        self.logger = Logger(out_dir)
        self.logger.initialize_log(command)
        self.config: Optional[config.RunConfig] = None
        self.manifest = RunManifest(
            command=command,
            config={},
            seeds={},
            inputs={},
            started_at=self.logger.start_time.isoformat(timespec="seconds"),
        )

    def log(self, message: str) -> None:
        self.logger.log_message(message)

    def configure(
        self, overrides: Dict[str, Any], config_path: Optional[str] = None
    ) -> config.RunConfig:
        self.config = config.build_run_config(overrides, config_path)
        self.manifest.config = self.config.to_dict()
        self.manifest.seeds["seed"] = self.config.seed
        if config_path:
            self.add_inputs([config_path])
        return self.config

    def schema(
        self, schema_path: Optional[str] = None
    ) -> Tuple[Tuple[AttributeSpec, ...], LabelSpec]:
        if not schema_path:
            return ADULT_SCHEMA, LabelSpec()
        self.add_inputs([schema_path])
        return load_schema(schema_path)

    def data_paths(self, paths: Sequence[str]) -> list:
        resolved = resolve_data_paths(paths)
        self.add_inputs(resolved)
        for path in resolved:
            self.logger.log_message(f"Input File: {path}", also_print=False)
        return resolved

    def add_inputs(self, paths: Sequence[str]) -> None:
        self.manifest.inputs.update(digests(paths))

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def output(self, path: str) -> str:
        """Record an artifact written under the output directory."""
        rel = os.path.relpath(path, self.out_dir)
        if rel not in self.manifest.outputs:
            self.manifest.outputs.append(rel)
        return path

    def write_json(self, name: str, data: Any) -> str:
        return self.output(write_json(self.path(name), data))

    def finish(self, exit_code: int, summary: Optional[Dict[str, object]] = None) -> int:
        self.manifest.exit_code = exit_code
        self.manifest.wall_clock_seconds = round(self.logger.elapsed(), 3)
        self.output(self.path(MANIFEST_FILE))
        if self.logger.log_filename:
            self.output(self.logger.log_filename)

        items: Dict[str, object] = {"Command": self.command, "Exit Code": exit_code}
        items.update(summary or {})
        items["Wall Clock"] = f"{self.manifest.wall_clock_seconds:.2f} seconds"
        self.logger.log_summary(items)
        write_json(self.path(MANIFEST_FILE), self.manifest.to_dict())
        self.logger.log_message(
            f"All artifacts have been saved to {self.out_dir} directory.", also_print=False
        )
        return exit_code


def run_command(
    command: str,
    out_dir: Optional[str],
    body: Callable[[RunContext], Optional[Dict[str, object]]],
) -> int:
    """
    Run `body` inside a RunContext and convert failures into exit codes:
    0 success, 1 validation failure, 2 usage or input error.

    `body` returns the summary items for the log, or a (exit_code, summary) pair
    when it finishes with a non-zero code of its own.
    """
    if not out_dir:
        timestamp = datetime.datetime.now().strftime("%Y%m%d-%H%M%S")
        out_dir = os.path.join("runs", command, timestamp)
    try:
        ctx = RunContext(command, out_dir)
    except OSError as e:
        print(f"Error: cannot create output directory '{out_dir}': {e}")
        return 2

    try:
        result = body(ctx)
    except CensusBoostError as e:
        ctx.log(f"Error: {e}")
        return ctx.finish(e.exit_code, {"Error": str(e)})
    except (OSError, ValueError) as e:
        ctx.log(f"Error: {e}")
        return ctx.finish(2, {"Error": str(e)})

    if isinstance(result, tuple):
        code, summary = result
        return ctx.finish(code, summary)
    return ctx.finish(0, result)
