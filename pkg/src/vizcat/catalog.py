"""Scan a repository root of example folders into an immutable catalog.

Per-folder problems become report entries, never exceptions: a folder
with at least one error is excluded from the catalog, warnings leave it
in. Scanning is deterministic — candidate folders are processed in
sorted order, so the result is independent of directory enumeration
order.
"""

from __future__ import annotations

import json
import os
from datetime import date
from pathlib import Path

from .model import (
    CAPABILITY_FLAGS,
    Capabilities,
    Catalog,
    ContainerRef,
    ExampleRecord,
    FolderNotWritable,
    InvalidRecord,
    REQUIRED_SECTIONS,
    RootNotFound,
    RootNotReadable,
    SECTION_IDS,
    Tag,
    TagCategory,
    ValidationReport,
    fold,
    is_safe_relpath,
    is_valid_image_ref,
    is_valid_issue_url,
    is_valid_slug,
)

METADATA_FILE = "meta.json"

_KNOWN_KEYS = {
    "title",
    "authors",
    "added",
    "tags",
    "capabilities",
    "container",
    "single_task",
    "issue_url",
    "images",
}


def parse_example(folder: Path) -> tuple[ExampleRecord | None, ValidationReport]:
    """Parse one example folder.

    Returns the record plus a report; the record is None exactly when the
    report carries at least one error. Unknown metadata keys are warnings
    (forward compatibility), malformed values are errors.
    """
    folder = Path(folder)
    report = ValidationReport()

    meta_path = folder / METADATA_FILE
    if not meta_path.is_file():
        report.error(folder, "missing-metadata", f"no {METADATA_FILE} in folder")
        return None, report

    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        report.error(folder, "malformed-metadata", f"{METADATA_FILE}: {exc}")
        return None, report
    if not isinstance(meta, dict):
        report.error(folder, "malformed-metadata", f"{METADATA_FILE}: top level must be an object")
        return None, report

    for key in sorted(set(meta) - _KNOWN_KEYS):
        report.warning(folder, "unknown-key", f"unknown metadata key {key!r}")

    slug = folder.name
    if not is_valid_slug(slug):
        report.error(folder, "bad-slug", f"folder name {slug!r} is not a valid slug")

    title = meta.get("title")
    if not isinstance(title, str) or not title.strip():
        report.error(folder, "malformed-metadata", "title must be a non-empty string")
        title = ""

    authors = meta.get("authors")
    if (
        not isinstance(authors, list)
        or not authors
        or not all(isinstance(a, str) and a.strip() for a in authors)
    ):
        report.error(folder, "malformed-metadata", "authors must be a non-empty list of names")
        authors = []

    added = _parse_date(meta.get("added"), folder, report)
    tags = _parse_tags(meta.get("tags"), folder, report)
    capabilities = _parse_capabilities(meta.get("capabilities"), folder, report)
    single_task = _parse_single_task(meta.get("single_task"), folder, report)
    container = _parse_container(meta.get("container"), folder, report)

    if capabilities.slurm and not (capabilities.mpi or single_task):
        report.error(
            folder,
            "bad-capabilities",
            "slurm requires mpi or a declared single_task batch entry",
        )

    issue_url = meta.get("issue_url")
    if issue_url is not None:
        if not isinstance(issue_url, str) or not is_valid_issue_url(issue_url):
            report.error(folder, "bad-issue-url", f"issue_url {issue_url!r} is not an http(s) URL")
            issue_url = None

    sections = _read_sections(folder, report)
    images = _collect_images(meta.get("images"), folder, report)

    resources_dir = "resources" if (folder / "resources").is_dir() else None

    if capabilities.preview and not _has_preview_assets(folder):
        report.warning(
            folder,
            "preview-assets-missing",
            "capabilities.preview is true but preview/ holds no files",
        )

    if report.has_errors:
        return None, report

    record = ExampleRecord(
        slug=slug,
        title=title.strip(),
        authors=tuple(a.strip() for a in authors),
        added=added,
        tags=tags,
        capabilities=capabilities,
        container=container,
        sections=sections,
        images=images,
        issue_url=issue_url,
        resources_dir=resources_dir,
        single_task=single_task,
        source_dir=folder.resolve(),
    )
    return record, report


def _parse_date(value, folder: Path, report: ValidationReport) -> date:
    if not isinstance(value, str):
        report.error(folder, "bad-date", "added must be an ISO date string (YYYY-MM-DD)")
        return date.min
    try:
        if len(value) != 10:
            raise ValueError(value)
        return date.fromisoformat(value)
    except ValueError:
        report.error(folder, "bad-date", f"added {value!r} is not a valid YYYY-MM-DD date")
        return date.min


def _parse_tags(value, folder: Path, report: ValidationReport) -> tuple[Tag, ...]:
    if not isinstance(value, list) or not value:
        report.error(folder, "malformed-metadata", "tags must be a non-empty list")
        return ()
    tags: list[Tag] = []
    seen: dict[str, Tag] = {}
    for item in value:
        if not isinstance(item, dict) or not isinstance(item.get("name"), str) or not item["name"].strip():
            report.error(folder, "malformed-metadata", f"tag entry {item!r} needs a non-empty name")
            continue
        name = item["name"].strip()
        category_raw = item.get("category")
        try:
            category = TagCategory(category_raw)
        except ValueError:
            report.error(
                folder,
                "unknown-tag-category",
                f"tag {name!r} has unknown category {category_raw!r}",
            )
            continue
        tag = Tag(name, category)
        prior = seen.get(tag.folded)
        if prior is not None:
            if prior.category is not category:
                report.error(
                    folder,
                    "tag-conflict",
                    f"tag {name!r} declared with categories {prior.category.value} and {category.value}",
                )
            else:
                report.warning(folder, "duplicate-tag", f"tag {name!r} declared twice")
            continue
        seen[tag.folded] = tag
        tags.append(tag)
    if not any(tag.category is TagCategory.DATA_TYPE for tag in tags):
        report.error(folder, "missing-data-type-tag", "at least one DataType tag is required")
    return tuple(tags)


def _parse_capabilities(value, folder: Path, report: ValidationReport) -> Capabilities:
    if not isinstance(value, dict):
        report.error(folder, "malformed-metadata", "capabilities must be an object")
        return Capabilities()
    flags = {}
    for flag in CAPABILITY_FLAGS:
        raw = value.get(flag)
        if not isinstance(raw, bool):
            report.error(folder, "malformed-metadata", f"capabilities.{flag} must be a boolean")
            raw = False
        flags[flag] = raw
    for key in sorted(set(value) - set(CAPABILITY_FLAGS)):
        report.warning(folder, "unknown-key", f"unknown metadata key 'capabilities.{key}'")
    return Capabilities(**flags)


def _parse_single_task(value, folder: Path, report: ValidationReport) -> bool:
    if value is None:
        return False
    if not isinstance(value, bool):
        report.error(folder, "malformed-metadata", "single_task must be a boolean")
        return False
    return value


def _parse_container(value, folder: Path, report: ValidationReport) -> ContainerRef:
    if not isinstance(value, dict):
        report.error(folder, "malformed-metadata", "container must be an object")
        return ContainerRef("invalid", ("invalid",))
    image = value.get("image")
    if not isinstance(image, str) or not is_valid_image_ref(image):
        report.error(folder, "bad-container", f"container.image {image!r} is not a valid reference")
        image = "invalid"
    entrypoint = value.get("entrypoint")
    if (
        not isinstance(entrypoint, list)
        or not entrypoint
        or not all(isinstance(a, str) for a in entrypoint)
        or not entrypoint[0].strip()
    ):
        report.error(
            folder,
            "bad-container",
            "container.entrypoint must be a non-empty argument list with a non-empty command",
        )
        entrypoint = ["invalid"]
    recipe = value.get("recipe")
    if recipe is not None:
        if not isinstance(recipe, str) or not recipe:
            report.error(folder, "malformed-metadata", "container.recipe must be a relative path")
            recipe = None
        else:
            recipe = recipe.rstrip("/")
            if not is_safe_relpath(recipe):
                report.error(folder, "path-escape", f"container.recipe {recipe!r} escapes the folder")
                recipe = None
            elif not (folder / recipe).is_dir():
                report.warning(folder, "missing-recipe", f"container.recipe {recipe!r} does not exist")
    for key in sorted(set(value) - {"image", "entrypoint", "recipe"}):
        report.warning(folder, "unknown-key", f"unknown metadata key 'container.{key}'")
    return ContainerRef(image, tuple(entrypoint), recipe)


def _read_sections(folder: Path, report: ValidationReport) -> dict[str, str]:
    sections: dict[str, str] = {}
    for section_id in SECTION_IDS:
        path = folder / f"{section_id}.md"
        text = ""
        if path.is_file():
            try:
                text = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                report.error(folder, "malformed-metadata", f"{path.name}: {exc}")
        if section_id in REQUIRED_SECTIONS and not text.strip():
            report.error(
                folder,
                f"missing-section:{section_id}",
                f"{section_id}.md is required and must not be empty",
            )
        sections[section_id] = text
    return sections


def _collect_images(declared, folder: Path, report: ValidationReport) -> tuple[str, ...]:
    images_dir = folder / "images"
    if declared is None:
        if not images_dir.is_dir():
            return ()
        found = sorted(
            p.relative_to(images_dir).as_posix()
            for p in images_dir.rglob("*")
            if p.is_file()
        )
        return tuple(found)
    if not isinstance(declared, list) or not all(isinstance(p, str) for p in declared):
        report.error(folder, "malformed-metadata", "images must be a list of relative paths")
        return ()
    images: list[str] = []
    for rel in declared:
        if not is_safe_relpath(rel):
            report.error(folder, "path-escape", f"image path {rel!r} escapes the folder")
            continue
        target = images_dir / rel
        if not target.is_file():
            report.error(folder, "bad-image-ref", f"image {rel!r} not found under images/")
            continue
        images.append(rel)
    return tuple(images)


def _has_preview_assets(folder: Path) -> bool:
    preview = folder / "preview"
    return preview.is_dir() and any(p.is_file() for p in preview.rglob("*"))


def scan_repository(root: Path) -> tuple[Catalog, ValidationReport]:
    """Scan every immediate, non-hidden subdirectory of root.

    Raises RootNotFound/RootNotReadable for root-level problems only;
    per-example problems land in the report.
    """
    root = Path(root)
    if not root.is_dir():
        raise RootNotFound(str(root))
    if not os.access(root, os.R_OK):
        raise RootNotReadable(str(root))

    report = ValidationReport()
    candidates = sorted(
        (p for p in root.iterdir() if p.is_dir() and not p.name.startswith(".")),
        key=lambda p: p.name,
    )

    parsed: dict[str, ExampleRecord] = {}
    folded_slugs: dict[str, list[Path]] = {}
    for folder in candidates:
        folded_slugs.setdefault(fold(folder.name), []).append(folder)
        record, folder_report = parse_example(folder)
        report.extend(folder_report)
        if record is not None:
            parsed[record.slug] = record

    for folded, folders in folded_slugs.items():
        if len(folders) > 1:
            names = ", ".join(sorted(f.name for f in folders))
            for f in folders:
                report.error(f, "duplicate-slug", f"slug collides after case folding: {names}")
                parsed.pop(f.name, None)

    examples, vocabulary = _resolve_tags(parsed, report)
    catalog = Catalog(
        examples=examples,
        tag_vocabulary=frozenset(vocabulary.values()),
        root=root.resolve(),
    )
    return catalog, report.sorted()


def _resolve_tags(
    parsed: dict[str, ExampleRecord], report: ValidationReport
) -> tuple[dict[str, ExampleRecord], dict[str, Tag]]:
    """Build the catalog-wide tag vocabulary.

    The first slug (in sorted order) to use a folded tag name pins its
    category and display form. A later example reusing the name with a
    different category is excluded (tag names are catalog-unique); a
    different display form only warns and adopts the pinned form in the
    vocabulary.
    """
    vocabulary: dict[str, Tag] = {}
    examples: dict[str, ExampleRecord] = {}
    for slug in sorted(parsed):
        record = parsed[slug]
        conflict = None
        for tag in record.tags:
            prior = vocabulary.get(tag.folded)
            if prior is not None and prior.category is not tag.category:
                conflict = (tag, prior)
                break
        if conflict is not None:
            tag, prior = conflict
            report.error(
                record.source_dir or slug,
                "tag-conflict",
                f"tag {tag.name!r} ({tag.category.value}) conflicts with "
                f"{prior.name!r} ({prior.category.value}) used elsewhere in the catalog",
            )
            continue
        for tag in record.tags:
            prior = vocabulary.get(tag.folded)
            if prior is None:
                vocabulary[tag.folded] = tag
            elif prior.name != tag.name:
                report.warning(
                    record.source_dir or slug,
                    "tag-display-mismatch",
                    f"tag {tag.name!r} also written {prior.name!r}; vocabulary keeps {prior.name!r}",
                )
        examples[slug] = record
    return examples, vocabulary


def validate_tree(root: Path) -> ValidationReport:
    """Aggregate parse results for every candidate folder under root."""
    _, report = scan_repository(root)
    return report


def serialize_example(record: ExampleRecord, folder: Path) -> None:
    """Write a record to a folder such that parse_example round-trips.

    Rejects invalid records before touching the filesystem. Listed images
    are created as empty placeholders when absent so the folder parses;
    real assets can be dropped in afterwards.
    """
    _check_record(record)
    folder = Path(folder)
    if folder.name != record.slug:
        raise InvalidRecord(f"folder name {folder.name!r} != slug {record.slug!r}")
    try:
        folder.mkdir(parents=True, exist_ok=True)
        probe = folder / ".write-probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise FolderNotWritable(str(folder)) from exc

    meta = {
        "title": record.title,
        "authors": list(record.authors),
        "added": record.added.isoformat(),
        "tags": [{"name": t.name, "category": t.category.value} for t in record.tags],
        "capabilities": {
            "preview": record.capabilities.preview,
            "mpi": record.capabilities.mpi,
            "slurm": record.capabilities.slurm,
            "dataset_replaceable": record.capabilities.dataset_replaceable,
        },
        "container": {
            "image": record.container.image,
            "entrypoint": list(record.container.entrypoint),
        },
        "single_task": record.single_task,
        "images": list(record.images),
    }
    if record.container.recipe_path is not None:
        meta["container"]["recipe"] = record.container.recipe_path
    if record.issue_url is not None:
        meta["issue_url"] = record.issue_url

    (folder / METADATA_FILE).write_text(
        json.dumps(meta, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    for section_id in SECTION_IDS:
        (folder / f"{section_id}.md").write_text(
            record.sections.get(section_id, ""), encoding="utf-8"
        )
    for rel in record.images:
        target = folder / "images" / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        if not target.exists():
            target.touch()
    if record.resources_dir is not None:
        (folder / record.resources_dir).mkdir(parents=True, exist_ok=True)
    if record.container.recipe_path is not None:
        (folder / record.container.recipe_path).mkdir(parents=True, exist_ok=True)


def _check_record(record: ExampleRecord) -> None:
    if not is_valid_slug(record.slug):
        raise InvalidRecord(f"invalid slug {record.slug!r}")
    if not record.title.strip():
        raise InvalidRecord("title must be non-empty")
    if not record.authors or not all(a.strip() for a in record.authors):
        raise InvalidRecord("authors must be a non-empty list of names")
    if not record.tags:
        raise InvalidRecord("tags must be non-empty")
    folded = [t.folded for t in record.tags]
    if len(set(folded)) != len(folded):
        raise InvalidRecord("tag names must be unique after case folding")
    if not any(t.category is TagCategory.DATA_TYPE for t in record.tags):
        raise InvalidRecord("at least one DataType tag is required")
    if any(not t.name.strip() for t in record.tags):
        raise InvalidRecord("tag names must be non-empty")
    caps = record.capabilities
    if caps.slurm and not (caps.mpi or record.single_task):
        raise InvalidRecord("slurm requires mpi or single_task")
    if not is_valid_image_ref(record.container.image):
        raise InvalidRecord(f"invalid container image {record.container.image!r}")
    if not record.container.entrypoint or not record.container.entrypoint[0].strip():
        raise InvalidRecord("entrypoint must start with a non-empty token")
    if record.container.recipe_path is not None and not is_safe_relpath(record.container.recipe_path):
        raise InvalidRecord(f"unsafe recipe path {record.container.recipe_path!r}")
    for section_id in REQUIRED_SECTIONS:
        if not record.sections.get(section_id, "").strip():
            raise InvalidRecord(f"section {section_id!r} must be non-empty")
    for rel in record.images:
        if not is_safe_relpath(rel):
            raise InvalidRecord(f"unsafe image path {rel!r}")
    if record.resources_dir is not None and record.resources_dir != "resources":
        raise InvalidRecord("resources_dir must be 'resources' when set")
    if record.issue_url is not None and not is_valid_issue_url(record.issue_url):
        raise InvalidRecord(f"invalid issue_url {record.issue_url!r}")


def record_to_jsonable(record: ExampleRecord) -> dict:
    """Full-record JSON shape shared by the API and CLI."""
    return {
        "slug": record.slug,
        "title": record.title,
        "authors": list(record.authors),
        "added": record.added.isoformat(),
        "tags": [{"name": t.name, "category": t.category.value} for t in record.tags],
        "capabilities": {
            "preview": record.capabilities.preview,
            "mpi": record.capabilities.mpi,
            "slurm": record.capabilities.slurm,
            "dataset_replaceable": record.capabilities.dataset_replaceable,
        },
        "container": {
            "image": record.container.image,
            "entrypoint": list(record.container.entrypoint),
            "recipe": record.container.recipe_path,
        },
        "single_task": record.single_task,
        "issue_url": record.issue_url,
        "sections": dict(record.sections),
        "images": list(record.images),
        "resources": record.resources_dir,
    }
