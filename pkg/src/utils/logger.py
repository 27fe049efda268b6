import os
import datetime
from typing import Dict, Optional, Sequence


class Logger:
    def __init__(self, out_dir: Optional[str] = None):
        """Initialize logger; messages go to stdout and <out_dir>/log.txt"""
        self.start_time = datetime.datetime.now()
        self.final_log_dir = out_dir
        self.log_filename: Optional[str] = None

    def initialize_log(
        self,
        command: str,
        inputs: Sequence[str] = (),
        out_dir: Optional[str] = None,
    ) -> None:
        """Create the output directory and write the log header"""
        if out_dir:
            self.final_log_dir = out_dir
        if not self.final_log_dir:
            timestamp = self.start_time.strftime("%Y%m%d-%H%M%S")
            self.final_log_dir = os.path.join("runs", command, timestamp)

        os.makedirs(self.final_log_dir, exist_ok=True)
        self.log_filename = os.path.join(self.final_log_dir, "log.txt")

        header = f"censusboost log - {command}\n"
        header += f"Start Time: {self.start_time.strftime('%Y-%m-%d %H:%M:%S')}\n"
        for path in inputs:
            header += f"Input File: {path}\n"
        header += "\n"

        with open(self.log_filename, "w") as log_file:
            log_file.write(header)

    def log_message(self, message: str, also_print: bool = True) -> None:
        """Record message to log file and optionally print to console"""
        if also_print:
            print(message)

        if self.log_filename:
            with open(self.log_filename, "a") as log_file:
                log_file.write(message + "\n")

    def log_summary(self, items: Dict[str, object]) -> None:
        """Append the result summary block"""
        lines = ["", "-" * 50, "Run Result Summary:"]
        lines.extend(f"- {key}: {value}" for key, value in items.items())
        lines.append("-" * 50)
        self.log_message("\n".join(lines))

    def elapsed(self) -> float:
        return (datetime.datetime.now() - self.start_time).total_seconds()
