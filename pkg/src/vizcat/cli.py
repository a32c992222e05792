"""Operator and contributor command line.

Exit codes: 0 success, 1 validation errors, 2 not found, 3 invalid
config or conflict, 4 missing runtime, 5 internal. stdout carries data,
stderr carries diagnostics.
"""

from __future__ import annotations

import json
import shlex
import sys
import tempfile
from datetime import date
from pathlib import Path

import click

from . import __version__
from .catalog import (
    parse_example,
    record_to_jsonable,
    scan_repository,
    serialize_example,
    validate_tree,
)
from .jsonutil import canonical_json
from .model import (
    Capabilities,
    ContainerRef,
    ExampleRecord,
    InvalidRecord,
    RootNotFound,
    RootNotReadable,
    SECTION_IDS,
    Severity,
    Tag,
    TagCategory,
    ValidationReport,
)
from .packager import (
    CapabilityMismatch,
    InvalidConfig,
    Mode,
    OutDirNotEmpty,
    PackageConfig,
    PullPolicy,
    Runtime,
    SlurmParams,
    archive_bundle,
    assemble_bundle,
)
from .runner import BundleLocked, MissingRuntime, SpawnFailure, execute
from .search import BadQuery, SearchQuery, SortKey, search

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NOT_FOUND = 2
EXIT_CONFLICT = 3
EXIT_MISSING_RUNTIME = 4
EXIT_INTERNAL = 5

_root_option = click.option(
    "--root",
    envvar="VIZCAT_ROOT",
    default=".",
    show_default=True,
    type=click.Path(file_okay=False),
    help="Catalog root directory of example folders.",
)


def _fail(code: int, message: str) -> None:
    click.echo(message, err=True)
    sys.exit(code)


def _load_catalog(root: str):
    try:
        catalog, _ = scan_repository(Path(root))
    except (RootNotFound, RootNotReadable) as exc:
        _fail(EXIT_NOT_FOUND, f"catalog root problem: {exc}")
    return catalog


@click.group()
@click.version_option(version=__version__, prog_name="vizcat")
def main() -> None:
    """Find, inspect, package, and run curated HPC visualization examples."""


@main.command()
@click.argument("target", type=click.Path(exists=False))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def validate(target: str, fmt: str) -> None:
    """Validate a catalog root or a single example folder."""
    path = Path(target)
    if not path.is_dir():
        _fail(EXIT_NOT_FOUND, f"no such directory: {target}")
    try:
        if (path / "meta.json").is_file():
            _, report = parse_example(path)
            report = report.sorted()
        else:
            report = validate_tree(path)
    except (RootNotFound, RootNotReadable) as exc:
        _fail(EXIT_NOT_FOUND, str(exc))
    if fmt == "json":
        click.echo(canonical_json(report.to_jsonable()).decode("utf-8"))
    else:
        for entry in report.entries:
            label = "ERROR" if entry.severity is Severity.ERROR else "WARN"
            click.echo(f"{label} {entry.folder} [{entry.code}] {entry.message}")
        errors, warnings = len(report.errors()), len(report.warnings())
        click.echo(f"{errors} error(s), {warnings} warning(s)")
    sys.exit(EXIT_VALIDATION if report.has_errors else EXIT_OK)


@main.command()
@click.argument("text", required=False, default="")
@click.option("--tag", "tags", multiple=True, help="Required tag (repeatable, ANDed).")
@click.option("--author", default=None)
@click.option("--caps", default="", help="Comma-separated capability flags.")
@click.option("--from", "added_from", default=None, help="Earliest added date (YYYY-MM-DD).")
@click.option("--to", "added_to", default=None, help="Latest added date (YYYY-MM-DD).")
@click.option("--sort", type=click.Choice([s.value for s in SortKey]), default=None)
@click.option("--page", type=int, default=0)
@click.option("--page-size", type=int, default=30)
@click.option("--json", "as_json", is_flag=True, help="Canonical JSON (same body as the API).")
@_root_option
def search_cmd(
    text, tags, author, caps, added_from, added_to, sort, page, page_size, as_json, root
) -> None:
    """Search the catalog."""
    catalog = _load_catalog(root)
    try:
        query = SearchQuery(
            text=text,
            required_tags=frozenset(tags),
            author=author,
            added_from=date.fromisoformat(added_from) if added_from else None,
            added_to=date.fromisoformat(added_to) if added_to else None,
            caps=frozenset(p.strip() for p in caps.split(",") if p.strip()),
            sort=SortKey(sort) if sort else None,
            page=page,
            page_size=page_size,
        )
        result = search(catalog, query)
    except (BadQuery, ValueError) as exc:
        _fail(EXIT_CONFLICT, f"bad query: {exc}")
    if as_json:
        click.echo(canonical_json(result.to_jsonable()).decode("utf-8"))
        return
    for item in result.items:
        tag_list = ", ".join(t.name for t in item.tags)
        click.echo(f"{item.slug:<40} {item.title} [{tag_list}]")
    click.echo(f"{result.total} match(es)")


@main.command()
@click.argument("slug")
@_root_option
def show(slug: str, root: str) -> None:
    """Show one example: metadata, tags by category, section outline."""
    catalog = _load_catalog(root)
    record = catalog.get(slug)
    if record is None:
        _fail(EXIT_NOT_FOUND, f"not found: {slug}")
    click.echo(record.title)
    click.echo(f"  slug:     {record.slug}")
    click.echo(f"  authors:  {', '.join(record.authors)}")
    click.echo(f"  added:    {record.added.isoformat()}")
    for category in TagCategory:
        names = [t.name for t in record.tags if t.category is category]
        if names:
            click.echo(f"  {category.value}: {', '.join(names)}")
    caps = record.capabilities
    flags = [
        name
        for name, value in (
            ("preview", caps.preview),
            ("mpi", caps.mpi),
            ("slurm", caps.slurm),
            ("dataset_replaceable", caps.dataset_replaceable),
        )
        if value
    ]
    click.echo(f"  capabilities: {', '.join(flags) if flags else 'none'}")
    click.echo(f"  container: {record.container.image}")
    if record.issue_url:
        click.echo(f"  issues:   {record.issue_url}")
    click.echo("  sections:")
    for section_id in SECTION_IDS:
        marker = "" if record.sections.get(section_id, "").strip() else " (empty)"
        click.echo(f"    - {section_id}{marker}")


@main.command()
@click.argument("slug")
@click.option("--runtime", type=click.Choice([r.value for r in Runtime]), required=True)
@click.option("--mode", type=click.Choice([m.value for m in Mode]), required=True)
@click.option("--data", "dataset_path", default=None, help="Absolute host path of your dataset.")
@click.option("--ranks", type=int, default=None)
@click.option("--slurm-partition", default=None)
@click.option("--slurm-nodes", type=int, default=None)
@click.option("--slurm-tasks-per-node", type=int, default=None)
@click.option("--slurm-time", default=None, help="Walltime HH:MM:SS.")
@click.option("--slurm-account", default=None)
@click.option("--pull", type=click.Choice([p.value for p in PullPolicy]), default="if-absent")
@click.option("-o", "--out", "out_path", type=click.Path(), default=None)
@click.option("--archive", is_flag=True, help="Write a tar.gz instead of a directory.")
@_root_option
def package(
    slug,
    runtime,
    mode,
    dataset_path,
    ranks,
    slurm_partition,
    slurm_nodes,
    slurm_tasks_per_node,
    slurm_time,
    slurm_account,
    pull,
    out_path,
    archive,
    root,
) -> None:
    """Generate a run bundle (or archive) for an example."""
    catalog = _load_catalog(root)
    record = catalog.get(slug)
    if record is None:
        _fail(EXIT_NOT_FOUND, f"not found: {slug}")
    slurm = None
    if any(v is not None for v in (slurm_partition, slurm_nodes, slurm_tasks_per_node, slurm_time)):
        if None in (slurm_partition, slurm_nodes, slurm_tasks_per_node, slurm_time):
            _fail(
                EXIT_CONFLICT,
                "slurm mode needs --slurm-partition, --slurm-nodes, "
                "--slurm-tasks-per-node and --slurm-time",
            )
        slurm = SlurmParams(
            partition=slurm_partition,
            nodes=slurm_nodes,
            tasks_per_node=slurm_tasks_per_node,
            walltime=slurm_time,
            account=slurm_account,
        )
    config = PackageConfig(
        runtime=Runtime(runtime),
        mode=Mode(mode),
        dataset_path=dataset_path,
        ranks=ranks,
        slurm=slurm,
        pull_policy=PullPolicy(pull),
    )
    try:
        if archive:
            target = Path(out_path) if out_path else Path(f"{slug}-bundle.tar.gz")
            with tempfile.TemporaryDirectory(prefix="vizcat-pkg-") as tmp:
                bundle = assemble_bundle(record, config, Path(tmp) / "bundle")
                target.write_bytes(archive_bundle(bundle))
            click.echo(str(target))
        else:
            target = Path(out_path) if out_path else Path(f"{slug}-bundle")
            assemble_bundle(record, config, target)
            click.echo(str(target))
    except (InvalidConfig, CapabilityMismatch, OutDirNotEmpty) as exc:
        _fail(EXIT_CONFLICT, f"{type(exc).__name__}: {exc}")


@main.command()
@click.argument("bundle_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--dry-run", is_flag=True, help="Print the command transcript, spawn nothing.")
def run(bundle_dir: str, dry_run: bool) -> None:
    """Execute a bundle's run.sh; the child's exit code is propagated."""
    try:
        outcome = execute(Path(bundle_dir), dry_run=dry_run)
    except MissingRuntime as exc:
        _fail(EXIT_MISSING_RUNTIME, f"MissingRuntime: {exc.name}")
    except (SpawnFailure, BundleLocked) as exc:
        _fail(EXIT_INTERNAL, f"{type(exc).__name__}: {exc}")
    if dry_run:
        for argv in outcome.command_transcript:
            click.echo(shlex.join(argv))
    sys.exit(outcome.exit_code)


@main.command()
@click.option("--port", envvar="VIZCAT_PORT", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--admin-token", envvar="VIZCAT_ADMIN_TOKEN", default=None)
@click.option("--cors-origin", envvar="VIZCAT_CORS_ORIGIN", default=None)
@click.option("--static", "static_dir", envvar="VIZCAT_STATIC", type=click.Path(), default=None)
@_root_option
def serve(port, host, admin_token, cors_origin, static_dir, root) -> None:
    """Serve the HTTP API (and optional static web assets) until interrupted."""
    import uvicorn

    from .api import create_app

    try:
        app = create_app(
            Path(root),
            admin_token=admin_token,
            cors_origin=cors_origin,
            static_dir=Path(static_dir) if static_dir else None,
        )
    except (RootNotFound, RootNotReadable) as exc:
        _fail(EXIT_NOT_FOUND, f"catalog root problem: {exc}")
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.argument("slug")
@click.option("--title", required=True)
@click.option(
    "--tag",
    "tags",
    multiple=True,
    required=True,
    help="name:category with category one of data-type, technique, domain (repeatable).",
)
@click.option("--author", "authors", multiple=True, default=("unknown",), show_default=True)
@click.option("--image", default="docker.io/library/alpine:3.19", show_default=True)
@click.option(
    "--entrypoint",
    default="echo replace-me",
    show_default=True,
    help="Command executed inside the container (shell-split).",
)
@_root_option
def new(slug, title, tags, authors, image, entrypoint, root) -> None:
    """Scaffold a new, immediately valid example folder."""
    folder = Path(root) / slug
    if folder.exists():
        _fail(EXIT_CONFLICT, f"refusing to overwrite existing folder: {folder}")
    parsed_tags = []
    for raw in tags:
        name, sep, category = raw.partition(":")
        normalized = category.strip().lower().replace("-", "").replace("_", "")
        by_alias = {"datatype": TagCategory.DATA_TYPE, "technique": TagCategory.TECHNIQUE, "domain": TagCategory.DOMAIN}
        if not sep or not name.strip() or normalized not in by_alias:
            _fail(EXIT_CONFLICT, f"bad --tag {raw!r}; expected name:category")
        parsed_tags.append(Tag(name.strip(), by_alias[normalized]))
    record = ExampleRecord(
        slug=slug,
        title=title,
        authors=tuple(authors),
        added=date.today(),
        tags=tuple(parsed_tags),
        capabilities=Capabilities(),
        container=ContainerRef(image=image, entrypoint=tuple(shlex.split(entrypoint))),
        sections={
            "description": f"# {title}\n\nDescribe the technique and the data it applies to.\n",
            "instructions": (
                "Package this example with `vizcat package` and start it with the\n"
                "generated `run.sh`.\n"
            ),
            "limitations": "",
            "references": "",
            "resources": "",
        },
    )
    try:
        serialize_example(record, folder)
    except InvalidRecord as exc:
        _fail(EXIT_CONFLICT, f"invalid example: {exc}")
    click.echo(str(folder))


if __name__ == "__main__":
    main()
