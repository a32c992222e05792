"""Detect container runtimes and execute (or dry-run) a bundle.

Dry-run never spawns a process: it parses the bundle's own run.sh back
into a command transcript. The parser only guarantees the grammar the
packager emits, and the transcript lists what would run on a fresh
machine (image not yet present), which is also what the stub-runtime
test harness reproduces.
"""

from __future__ import annotations

import json
import os
import re
import shlex
import shutil
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .packager import Mode, PackageConfig, Runtime, config_from_jsonable

_VERSION_RE = re.compile(r"(\d+(?:\.\d+)+)")


class MissingRuntime(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"required tool not found on PATH: {name}")


class SpawnFailure(Exception):
    pass


class BundleLocked(Exception):
    pass


@dataclass(frozen=True)
class ToolStatus:
    present: bool
    version: str | None = None


@dataclass(frozen=True)
class RuntimeProbe:
    docker: ToolStatus
    apptainer: ToolStatus
    mpirun: ToolStatus
    sbatch: ToolStatus

    def status(self, name: str) -> ToolStatus:
        return getattr(self, name)


@dataclass(frozen=True)
class RunOutcome:
    exit_code: int
    stdout_path: Path | None
    stderr_path: Path | None
    duration: float
    dry_run: bool
    command_transcript: list[list[str]] = field(default_factory=list)


def _probe_version(executable: str) -> str | None:
    try:
        proc = subprocess.run(
            [executable, "--version"],
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    match = _VERSION_RE.search(proc.stdout or proc.stderr or "")
    return match.group(1) if match else None


def probe_runtimes() -> RuntimeProbe:
    """Look up tools on PATH; version parsing is best-effort."""

    def tool(name: str, with_version: bool) -> ToolStatus:
        path = shutil.which(name)
        if path is None:
            return ToolStatus(present=False)
        return ToolStatus(present=True, version=_probe_version(name) if with_version else None)

    return RuntimeProbe(
        docker=tool("docker", True),
        apptainer=tool("apptainer", True),
        mpirun=tool("mpirun", False),
        sbatch=tool("sbatch", False),
    )


def required_tools(config: PackageConfig) -> list[str]:
    tools = [config.runtime.value]
    # Docker+MPI launches mpirun inside the container; only the Apptainer
    # hybrid model needs a host mpirun.
    if config.mode is Mode.MPI and config.runtime is Runtime.APPTAINER:
        tools.append("mpirun")
    if config.mode is Mode.SLURM:
        tools.append("sbatch")
    return tools


_REDIRECT_RE = re.compile(r"\d*>>?\S*|\d*>&\d+")


def parse_transcript(script_text: str) -> list[list[str]]:
    """Recover the command sequence from a packager-generated run.sh."""
    transcript: list[list[str]] = []
    for raw in script_text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line == "set -eu" or line == "fi":
            continue
        if line.startswith("cd "):
            continue
        if line.startswith("if [") and line.endswith("; then"):
            continue  # file-existence test, not a command
        if line.startswith("if ! ") and line.endswith("; then"):
            inner = line[len("if ! ") : -len("; then")]
            tokens = [t for t in shlex.split(inner) if not _REDIRECT_RE.fullmatch(t)]
            transcript.append(tokens)
            continue
        transcript.append(shlex.split(line))
    return transcript


def _read_bundle_config(bundle_dir: Path) -> PackageConfig:
    config_path = bundle_dir / "config.json"
    if not config_path.is_file():
        raise SpawnFailure(f"{config_path} not found; not a run bundle?")
    return config_from_jsonable(json.loads(config_path.read_text(encoding="utf-8")))


def _pump(src, sink, mirror) -> None:
    for chunk in iter(lambda: src.read(8192), b""):
        sink.write(chunk)
        buffer = getattr(mirror, "buffer", None)
        if buffer is not None:
            buffer.write(chunk)
            buffer.flush()
        else:
            mirror.write(chunk.decode("utf-8", errors="replace"))
            mirror.flush()


def execute(bundle_dir: Path, dry_run: bool = False) -> RunOutcome:
    """Run a bundle's run.sh, streaming and capturing output.

    The child's exit code is propagated verbatim. Output is captured to
    logs/stdout.txt and logs/stderr.txt next to the scripts while also
    streaming live. A lock file (logs/.lock) serializes executions per
    bundle directory.
    """
    bundle_dir = Path(bundle_dir).resolve()  # keep run.sh reachable under cwd=bundle_dir
    run_sh = bundle_dir / "run.sh"
    if not run_sh.is_file():
        raise SpawnFailure(f"{run_sh} not found")
    transcript = parse_transcript(run_sh.read_text(encoding="utf-8"))

    if dry_run:
        return RunOutcome(
            exit_code=0,
            stdout_path=None,
            stderr_path=None,
            duration=0.0,
            dry_run=True,
            command_transcript=transcript,
        )

    config = _read_bundle_config(bundle_dir)
    probe = probe_runtimes()
    for tool in required_tools(config):
        if not probe.status(tool).present:
            raise MissingRuntime(tool)

    logs_dir = bundle_dir / "logs"
    logs_dir.mkdir(exist_ok=True)
    lock_path = logs_dir / ".lock"
    try:
        lock_fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise BundleLocked(f"another run holds {lock_path}") from None

    stdout_path = logs_dir / "stdout.txt"
    stderr_path = logs_dir / "stderr.txt"
    started = time.monotonic()
    try:
        try:
            proc = subprocess.Popen(
                ["sh", str(run_sh)],
                cwd=bundle_dir,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
            )
        except OSError as exc:
            raise SpawnFailure(str(exc)) from exc
        with stdout_path.open("wb") as out_sink, stderr_path.open("wb") as err_sink:
            threads = [
                threading.Thread(target=_pump, args=(proc.stdout, out_sink, sys.stdout)),
                threading.Thread(target=_pump, args=(proc.stderr, err_sink, sys.stderr)),
            ]
            for t in threads:
                t.start()
            exit_code = proc.wait()
            for t in threads:
                t.join()
    finally:
        os.close(lock_fd)
        lock_path.unlink(missing_ok=True)

    return RunOutcome(
        exit_code=exit_code,
        stdout_path=stdout_path,
        stderr_path=stderr_path,
        duration=time.monotonic() - started,
        dry_run=False,
        command_transcript=transcript,
    )
