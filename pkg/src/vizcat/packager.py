"""Turn (record, config) into a deterministic run bundle.

A bundle is a directory with a single POSIX-sh entry script that pulls
the container image and executes the example under the chosen runtime
and mode, plus the resolved config, the example's resources, and a
verbatim copy of its container recipe. Bundle content is a pure
function of (record, config): no timestamps, no host paths other than
the dataset path the user supplied.

MPI placement differs by runtime: rootless Docker on a workstation runs
``mpirun`` inside the container, while Apptainer follows the hybrid
host-MPI model and is wrapped from outside. Under Slurm, ``srun`` is
the launcher and ``mpirun`` appears nowhere.
"""

from __future__ import annotations

import gzip
import io
import re
import shlex
import shutil
import tarfile
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .jsonutil import canonical_json
from .model import ExampleRecord, WALLTIME_RE

DATA_MOUNT = "/data"
SIF_NAME = "image.sif"

_SLURM_TOKEN_RE = re.compile(r"[A-Za-z0-9._-]+")


class Runtime(str, Enum):
    DOCKER = "docker"
    APPTAINER = "apptainer"


class Mode(str, Enum):
    LOCAL = "local"
    MPI = "mpi"
    SLURM = "slurm"


class PullPolicy(str, Enum):
    IF_ABSENT = "if-absent"
    ALWAYS = "always"


class CapabilityMismatch(Exception):
    """Config requests something the example's capabilities forbid."""

    def __init__(self, capability: str):
        self.capability = capability
        super().__init__(f"example does not support {capability}")


class InvalidConfig(Exception):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class OutDirNotEmpty(Exception):
    pass


class IoFailure(Exception):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class SlurmParams:
    partition: str
    nodes: int
    tasks_per_node: int
    walltime: str
    account: str | None = None
    extra_directives: tuple[str, ...] = ()


@dataclass(frozen=True)
class PackageConfig:
    runtime: Runtime
    mode: Mode
    dataset_path: str | None = None
    ranks: int | None = None
    slurm: SlurmParams | None = None
    pull_policy: PullPolicy = PullPolicy.IF_ABSENT

    def validate(self) -> None:
        if self.dataset_path is not None:
            if not self.dataset_path.startswith("/"):
                raise InvalidConfig("dataset_path", "must be an absolute host path")
            if any(c in self.dataset_path for c in "\n\r\x00"):
                raise InvalidConfig("dataset_path", "must not contain newlines or NUL")
        if self.ranks is not None and self.ranks < 1:
            raise InvalidConfig("ranks", "must be >= 1")
        if self.mode is Mode.SLURM:
            if self.slurm is None:
                raise InvalidConfig("slurm", "slurm parameters required in slurm mode")
            self.slurm_validate(self.slurm)
            expected = self.slurm.nodes * self.slurm.tasks_per_node
            if self.ranks is not None and self.ranks != expected:
                raise InvalidConfig(
                    "ranks",
                    f"{self.ranks} != nodes x tasks_per_node = {expected}",
                )
        else:
            if self.slurm is not None:
                raise InvalidConfig("slurm", f"slurm parameters not allowed in {self.mode.value} mode")
            if self.mode is Mode.LOCAL and self.ranks not in (None, 1):
                raise InvalidConfig("ranks", "local mode runs a single rank")

    @staticmethod
    def slurm_validate(slurm: SlurmParams) -> None:
        if not _SLURM_TOKEN_RE.fullmatch(slurm.partition or ""):
            raise InvalidConfig("slurm.partition", f"invalid partition {slurm.partition!r}")
        if slurm.nodes < 1:
            raise InvalidConfig("slurm.nodes", "must be >= 1")
        if slurm.tasks_per_node < 1:
            raise InvalidConfig("slurm.tasks_per_node", "must be >= 1")
        if not WALLTIME_RE.fullmatch(slurm.walltime or ""):
            raise InvalidConfig("slurm.walltime", f"walltime {slurm.walltime!r} must be HH:MM:SS")
        if slurm.account is not None and not _SLURM_TOKEN_RE.fullmatch(slurm.account):
            raise InvalidConfig("slurm.account", f"invalid account {slurm.account!r}")
        for directive in slurm.extra_directives:
            if "\n" in directive or "\r" in directive:
                raise InvalidConfig("slurm.extra_directives", "directives must be single lines")

    @property
    def effective_ranks(self) -> int:
        if self.mode is Mode.SLURM:
            assert self.slurm is not None
            return self.slurm.nodes * self.slurm.tasks_per_node
        return self.ranks if self.ranks is not None else 1

    def normalized(self) -> PackageConfig:
        """The exact config a bundle records: ranks resolved to a number."""
        self.validate()
        return replace(self, ranks=self.effective_ranks)


def config_to_jsonable(config: PackageConfig) -> dict:
    slurm = None
    if config.slurm is not None:
        slurm = {
            "partition": config.slurm.partition,
            "nodes": config.slurm.nodes,
            "tasks_per_node": config.slurm.tasks_per_node,
            "walltime": config.slurm.walltime,
            "account": config.slurm.account,
            "extra_directives": list(config.slurm.extra_directives),
        }
    return {
        "runtime": config.runtime.value,
        "mode": config.mode.value,
        "dataset_path": config.dataset_path,
        "ranks": config.ranks,
        "slurm": slurm,
        "pull_policy": config.pull_policy.value,
    }


def config_from_jsonable(data: dict) -> PackageConfig:
    if not isinstance(data, dict):
        raise InvalidConfig("config", "must be an object")

    def _enum(cls, field, default=None):
        raw = data.get(field, default)
        if raw is None and default is None and field in ("runtime", "mode"):
            raise InvalidConfig(field, "is required")
        try:
            return cls(raw)
        except ValueError:
            raise InvalidConfig(field, f"unknown value {raw!r}") from None

    runtime = _enum(Runtime, "runtime")
    mode = _enum(Mode, "mode")
    pull_policy = _enum(PullPolicy, "pull_policy", PullPolicy.IF_ABSENT.value)

    dataset_path = data.get("dataset_path")
    if dataset_path is not None and not isinstance(dataset_path, str):
        raise InvalidConfig("dataset_path", "must be a string path")
    ranks = data.get("ranks")
    if ranks is not None and (isinstance(ranks, bool) or not isinstance(ranks, int)):
        raise InvalidConfig("ranks", "must be an integer")

    slurm = None
    raw_slurm = data.get("slurm")
    if raw_slurm is not None:
        if not isinstance(raw_slurm, dict):
            raise InvalidConfig("slurm", "must be an object")
        try:
            slurm = SlurmParams(
                partition=str(raw_slurm["partition"]),
                nodes=int(raw_slurm["nodes"]),
                tasks_per_node=int(raw_slurm["tasks_per_node"]),
                walltime=str(raw_slurm["walltime"]),
                account=(None if raw_slurm.get("account") is None else str(raw_slurm["account"])),
                extra_directives=tuple(
                    str(d) for d in raw_slurm.get("extra_directives", [])
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig("slurm", f"incomplete slurm parameters: {exc}") from None

    config = PackageConfig(
        runtime=runtime,
        mode=mode,
        dataset_path=dataset_path,
        ranks=ranks,
        slurm=slurm,
        pull_policy=pull_policy,
    )
    config.validate()
    return config


# --- planning ---------------------------------------------------------


@dataclass(frozen=True)
class ImageAcquisition:
    runtime: Runtime
    image: str
    pull_policy: PullPolicy


@dataclass(frozen=True)
class DataBinding:
    host_path: str
    mount_point: str = DATA_MOUNT


@dataclass(frozen=True)
class ContainerInvocation:
    runtime: Runtime
    image: str
    entrypoint: tuple[str, ...]
    in_container_launcher: tuple[str, ...] = ()


@dataclass(frozen=True)
class LauncherWrapping:
    mode: Mode
    outer_launcher: tuple[str, ...] = ()
    slurm: SlurmParams | None = None


@dataclass(frozen=True)
class RunPlan:
    slug: str
    config: PackageConfig
    image_acquisition: ImageAcquisition
    container_invocation: ContainerInvocation
    launcher_wrapping: LauncherWrapping
    data_binding: DataBinding | None
    has_resources: bool = False
    recipe_dir: str | None = None


def plan_package(record: ExampleRecord, config: PackageConfig) -> RunPlan:
    """Validate config against the record and lay out the run, before any I/O."""
    config = config.normalized()
    caps = record.capabilities
    if config.mode is Mode.MPI and not caps.mpi:
        raise CapabilityMismatch("mpi")
    if config.mode is Mode.SLURM and not caps.slurm:
        raise CapabilityMismatch("slurm")
    if config.mode is Mode.SLURM and config.effective_ranks > 1 and not caps.mpi:
        raise CapabilityMismatch("mpi")
    if config.dataset_path is not None and not caps.dataset_replaceable:
        raise CapabilityMismatch("dataset")

    in_container: tuple[str, ...] = ()
    outer: tuple[str, ...] = ()
    if config.mode is Mode.MPI:
        mpirun = ("mpirun", "-np", str(config.effective_ranks))
        if config.runtime is Runtime.DOCKER:
            in_container = mpirun
        else:
            outer = mpirun

    binding = None
    if config.dataset_path is not None:
        binding = DataBinding(host_path=config.dataset_path)

    recipe_dir = None
    if record.container.recipe_path is not None and record.source_dir is not None:
        if (record.source_dir / record.container.recipe_path).is_dir():
            recipe_dir = record.container.recipe_path

    return RunPlan(
        slug=record.slug,
        config=config,
        image_acquisition=ImageAcquisition(config.runtime, record.container.image, config.pull_policy),
        container_invocation=ContainerInvocation(
            runtime=config.runtime,
            image=record.container.image,
            entrypoint=record.container.entrypoint,
            in_container_launcher=in_container,
        ),
        launcher_wrapping=LauncherWrapping(
            mode=config.mode,
            outer_launcher=outer,
            slurm=config.slurm,
        ),
        data_binding=binding,
        has_resources=record.resources_dir is not None,
        recipe_dir=recipe_dir,
    )


# --- script rendering -------------------------------------------------


def _sh(tokens: list[str] | tuple[str, ...]) -> str:
    return " ".join(shlex.quote(t) for t in tokens)


def _acquisition_lines(acq: ImageAcquisition) -> list[str]:
    if acq.runtime is Runtime.DOCKER:
        pull = _sh(["docker", "pull", acq.image])
        if acq.pull_policy is PullPolicy.ALWAYS:
            return [pull]
        inspect = _sh(["docker", "image", "inspect", acq.image])
        return [f"if ! {inspect} >/dev/null 2>&1; then", f"    {pull}", "fi"]
    pull_target = f"docker://{acq.image}"
    if acq.pull_policy is PullPolicy.ALWAYS:
        return [_sh(["apptainer", "pull", "--force", SIF_NAME, pull_target])]
    pull = _sh(["apptainer", "pull", SIF_NAME, pull_target])
    return [f"if [ ! -f {SIF_NAME} ]; then", f"    {pull}", "fi"]


def _invocation_tokens(inv: ContainerInvocation, binding: DataBinding | None) -> list[str]:
    if inv.runtime is Runtime.DOCKER:
        tokens = ["docker", "run", "--rm"]
        if binding is not None:
            tokens += ["-v", f"{binding.host_path}:{binding.mount_point}:ro"]
        tokens.append(inv.image)
        tokens += list(inv.in_container_launcher)
        tokens += list(inv.entrypoint)
        return tokens
    tokens = ["apptainer", "exec"]
    if binding is not None:
        tokens += ["--bind", f"{binding.host_path}:{binding.mount_point}"]
    tokens.append(SIF_NAME)
    tokens += list(inv.entrypoint)
    return tokens


def _launch_tokens(plan: RunPlan) -> list[str]:
    inner = _invocation_tokens(plan.container_invocation, plan.data_binding)
    if plan.launcher_wrapping.mode is Mode.SLURM:
        return ["srun"] + inner
    return list(plan.launcher_wrapping.outer_launcher) + inner


def render_scripts(plan: RunPlan) -> dict[str, str]:
    """Render run.sh (always) and job.sbatch (Slurm only) as POSIX sh."""
    lines = ["#!/bin/sh", "set -eu", 'cd -- "$(dirname -- "$0")"', ""]
    lines += _acquisition_lines(plan.image_acquisition)
    if plan.launcher_wrapping.mode is Mode.SLURM:
        lines.append(_sh(["sbatch", "job.sbatch"]))
    else:
        lines.append(_sh(_launch_tokens(plan)))
    scripts = {"run.sh": "\n".join(lines) + "\n"}

    if plan.launcher_wrapping.mode is Mode.SLURM:
        slurm = plan.launcher_wrapping.slurm
        assert slurm is not None
        batch = [
            "#!/bin/sh",
            f"#SBATCH --partition={slurm.partition}",
            f"#SBATCH --nodes={slurm.nodes}",
            f"#SBATCH --ntasks-per-node={slurm.tasks_per_node}",
            f"#SBATCH --time={slurm.walltime}",
        ]
        if slurm.account is not None:
            batch.append(f"#SBATCH --account={slurm.account}")
        for directive in slurm.extra_directives:
            prefix = "" if directive.startswith("#SBATCH") else "#SBATCH "
            batch.append(f"{prefix}{directive}")
        batch += ["set -eu", "", _sh(_launch_tokens(plan))]
        scripts["job.sbatch"] = "\n".join(batch) + "\n"
    return scripts


# --- assembly ---------------------------------------------------------


@dataclass(frozen=True)
class RunBundle:
    dir: Path
    files: tuple[str, ...]


def assemble_bundle(record: ExampleRecord, config: PackageConfig, out_dir: Path) -> RunBundle:
    """Materialize the bundle into an empty (or absent) directory."""
    plan = plan_package(record, config)
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()):
        raise OutDirNotEmpty(str(out_dir))
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        scripts = render_scripts(plan)
        for name, text in scripts.items():
            (out_dir / name).write_text(text, encoding="utf-8")
        (out_dir / "run.sh").chmod(0o755)
        (out_dir / "config.json").write_bytes(
            canonical_json(config_to_jsonable(plan.config)) + b"\n"
        )
        if plan.has_resources and record.source_dir is not None:
            shutil.copytree(record.source_dir / "resources", out_dir / "resources")
        if plan.recipe_dir is not None and record.source_dir is not None:
            shutil.copytree(record.source_dir / plan.recipe_dir, out_dir / "container")
    except OSError as exc:
        raise IoFailure(str(out_dir), str(exc)) from exc

    files = tuple(
        sorted(
            p.relative_to(out_dir).as_posix()
            for p in out_dir.rglob("*")
            if p.is_file()
        )
    )
    return RunBundle(dir=out_dir, files=files)


def archive_bundle(bundle: RunBundle) -> bytes:
    """Deterministic tar+gzip: sorted entries, epoch-0 mtime, uid/gid 0.

    File modes are normalized to 0755/0644 by executability so archives
    do not depend on the creating umask.
    """
    entries: list[Path] = sorted(bundle.dir.rglob("*"), key=lambda p: p.relative_to(bundle.dir).as_posix())
    buf = io.BytesIO()
    try:
        with gzip.GzipFile(fileobj=buf, mode="wb", mtime=0) as gz:
            with tarfile.open(fileobj=gz, mode="w", format=tarfile.USTAR_FORMAT) as tar:
                for path in entries:
                    rel = path.relative_to(bundle.dir).as_posix()
                    info = tarfile.TarInfo(rel + "/" if path.is_dir() else rel)
                    info.mtime = 0
                    info.uid = info.gid = 0
                    info.uname = info.gname = ""
                    if path.is_dir():
                        info.type = tarfile.DIRTYPE
                        info.mode = 0o755
                        tar.addfile(info)
                    else:
                        info.size = path.stat().st_size
                        info.mode = 0o755 if path.stat().st_mode & 0o111 else 0o644
                        with path.open("rb") as fh:
                            tar.addfile(info, fh)
    except OSError as exc:
        raise IoFailure(str(bundle.dir), str(exc)) from exc
    return buf.getvalue()
