"""Domain types for the example catalog.

An example is a folder: machine-readable ``meta.json``, five markdown
section files, preview images under ``images/``, an opaque ``resources/``
payload, and an optional ``container/`` build recipe carried verbatim.
These types are the in-memory form of that contract; parsing and
validation live in :mod:`vizcat.catalog`.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from pathlib import Path
from urllib.parse import urlparse

SLUG_RE = re.compile(r"[a-z0-9][a-z0-9-]*")
MAX_SLUG_LEN = 64

# Section ids, in the order they are rendered. description and
# instructions must be non-empty; the rest may be empty.
SECTION_IDS = ("description", "instructions", "limitations", "references", "resources")
REQUIRED_SECTIONS = ("description", "instructions")

# Container image reference: [host[:port]/]name[:tag|@digest], no whitespace.
_HOST = r"(?:localhost|[a-zA-Z0-9](?:[a-zA-Z0-9-]*[a-zA-Z0-9])?(?:\.[a-zA-Z0-9](?:[a-zA-Z0-9-]*[a-zA-Z0-9])?)+)(?::[0-9]+)?"
_NAME_COMPONENT = r"[a-z0-9]+(?:(?:\.|_{1,2}|-+)[a-z0-9]+)*"
_TAG = r"[A-Za-z0-9_][A-Za-z0-9._-]{0,127}"
_DIGEST = r"[A-Za-z][A-Za-z0-9]*(?:[-_+.][A-Za-z][A-Za-z0-9]*)*:[0-9a-fA-F]{32,}"
IMAGE_RE = re.compile(
    rf"(?:{_HOST}/)?{_NAME_COMPONENT}(?:/{_NAME_COMPONENT})*(?::{_TAG}|@{_DIGEST})?"
)

WALLTIME_RE = re.compile(r"[0-9]{1,4}:[0-5][0-9]:[0-5][0-9]")


class RootNotFound(Exception):
    """Catalog root directory does not exist."""


class RootNotReadable(Exception):
    """Catalog root exists but cannot be read."""


class FolderNotWritable(Exception):
    """Target example folder cannot be written."""


class InvalidRecord(ValueError):
    """A record violates its invariants (raised before any write)."""


def fold(text: str) -> str:
    """Case-insensitive normal form: NFC + casefold."""
    return unicodedata.normalize("NFC", text).casefold()


_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Split text into folded alphanumeric tokens."""
    return _TOKEN_RE.findall(fold(text))


class TagCategory(str, Enum):
    DATA_TYPE = "DataType"
    TECHNIQUE = "Technique"
    DOMAIN = "Domain"


@dataclass(frozen=True)
class Tag:
    """Categorized label; display form preserved, matching is folded."""

    name: str
    category: TagCategory

    @property
    def folded(self) -> str:
        return fold(self.name)


@dataclass(frozen=True)
class Capabilities:
    preview: bool = False
    mpi: bool = False
    slurm: bool = False
    dataset_replaceable: bool = False


CAPABILITY_FLAGS = ("preview", "mpi", "slurm", "dataset_replaceable")


@dataclass(frozen=True)
class ContainerRef:
    image: str
    entrypoint: tuple[str, ...]
    recipe_path: str | None = None


def is_valid_image_ref(image: str) -> bool:
    return bool(IMAGE_RE.fullmatch(image))


def is_valid_slug(slug: str) -> bool:
    return len(slug) <= MAX_SLUG_LEN and bool(SLUG_RE.fullmatch(slug))


def is_valid_issue_url(url: str) -> bool:
    parsed = urlparse(url)
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def is_safe_relpath(path: str) -> bool:
    """Syntactic containment: relative, no ``..`` components, no drive letters."""
    if not path or path.startswith(("/", "\\")):
        return False
    parts = path.replace("\\", "/").split("/")
    return all(part not in ("", ".", "..") for part in parts) and ":" not in path


@dataclass(frozen=True)
class ExampleRecord:
    """One catalog entry, matching the on-disk example folder.

    ``images`` are paths relative to the folder's ``images/`` directory,
    in carousel order. ``source_dir`` is set by the parser so downstream
    consumers (packager, API) can reach the payload files; it is excluded
    from equality so that serialize/parse round-trips compare clean.
    """

    slug: str
    title: str
    authors: tuple[str, ...]
    added: date
    tags: tuple[Tag, ...]
    capabilities: Capabilities
    container: ContainerRef
    sections: dict[str, str]
    images: tuple[str, ...] = ()
    issue_url: str | None = None
    resources_dir: str | None = None
    single_task: bool = False
    source_dir: Path | None = field(default=None, compare=False)

    def tag_names_folded(self) -> set[str]:
        return {tag.folded for tag in self.tags}

    def image_path(self, name: str) -> Path | None:
        """Resolve one of ``images`` against the source folder, or None."""
        if self.source_dir is None:
            return None
        return self.source_dir / "images" / name


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class ReportEntry:
    folder: str
    severity: Severity
    code: str
    message: str


@dataclass
class ValidationReport:
    entries: list[ReportEntry] = field(default_factory=list)

    def add(self, folder: Path | str, severity: Severity, code: str, message: str) -> None:
        self.entries.append(ReportEntry(str(folder), severity, code, message))

    def error(self, folder: Path | str, code: str, message: str) -> None:
        self.add(folder, Severity.ERROR, code, message)

    def warning(self, folder: Path | str, code: str, message: str) -> None:
        self.add(folder, Severity.WARNING, code, message)

    def extend(self, other: ValidationReport) -> None:
        self.entries.extend(other.entries)

    def errors(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.severity is Severity.ERROR]

    def warnings(self) -> list[ReportEntry]:
        return [e for e in self.entries if e.severity is Severity.WARNING]

    @property
    def has_errors(self) -> bool:
        return any(e.severity is Severity.ERROR for e in self.entries)

    def sorted(self) -> ValidationReport:
        """Deterministic entry order, independent of scan order."""
        key = lambda e: (e.folder, e.severity.value, e.code, e.message)
        return ValidationReport(sorted(self.entries, key=key))

    def to_jsonable(self) -> dict:
        return {
            "entries": [
                {
                    "folder": e.folder,
                    "severity": e.severity.value,
                    "code": e.code,
                    "message": e.message,
                }
                for e in self.entries
            ]
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> ValidationReport:
        return cls(
            [
                ReportEntry(e["folder"], Severity(e["severity"]), e["code"], e["message"])
                for e in data["entries"]
            ]
        )


@dataclass(frozen=True)
class Catalog:
    """Immutable scan result; safe to share across concurrent readers."""

    examples: dict[str, ExampleRecord]
    tag_vocabulary: frozenset[Tag]
    root: Path
    scanned_at: datetime = field(compare=False, default_factory=datetime.utcnow)

    def __len__(self) -> int:
        return len(self.examples)

    def records(self) -> list[ExampleRecord]:
        """Records in slug order (the catalog's canonical iteration order)."""
        return [self.examples[slug] for slug in sorted(self.examples)]

    def get(self, slug: str) -> ExampleRecord | None:
        return self.examples.get(slug)

    def tag_by_folded(self) -> dict[str, Tag]:
        return {tag.folded: tag for tag in self.tag_vocabulary}
