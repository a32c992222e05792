"""Filter, rank, and sort catalog entries; keyword suggestions.

Deliberately a linear scan over the in-memory catalog: catalogs hold
tens to hundreds of entries, and a transparent scan keeps results
deterministic and bit-equal to the brute-force reference used in tests.
All matching is case-insensitive via the shared fold().
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from .model import Catalog, ExampleRecord, Tag, fold, tokenize

TITLE_WEIGHT = 3
TAG_WEIGHT = 2
DESCRIPTION_WEIGHT = 1

DEFAULT_PAGE_SIZE = 30
MAX_PAGE_SIZE = 100


class SortKey(str, Enum):
    RELEVANCE = "relevance"
    DATE_DESC = "date-desc"
    DATE_ASC = "date-asc"
    TITLE_ASC = "title-asc"


class BadQuery(ValueError):
    """Query violates its invariants (bad range, page size, flag...)."""


@dataclass(frozen=True)
class SearchQuery:
    text: str = ""
    required_tags: frozenset[str] = frozenset()
    author: str | None = None
    added_from: date | None = None
    added_to: date | None = None
    caps: frozenset[str] = frozenset()
    sort: SortKey | None = None  # None = relevance with text, date-desc otherwise
    page: int = 0
    page_size: int = DEFAULT_PAGE_SIZE

    def validate(self) -> None:
        if self.added_from and self.added_to and self.added_from > self.added_to:
            raise BadQuery("added_from must not be after added_to")
        if self.page < 0:
            raise BadQuery("page must be >= 0")
        if not 1 <= self.page_size <= MAX_PAGE_SIZE:
            raise BadQuery(f"page_size must be in 1..{MAX_PAGE_SIZE}")
        unknown = self.caps - {"preview", "mpi", "slurm", "dataset_replaceable"}
        if unknown:
            raise BadQuery(f"unknown capability flags: {sorted(unknown)}")

    @property
    def effective_sort(self) -> SortKey:
        if self.sort is not None:
            return self.sort
        return SortKey.RELEVANCE if self.text.strip() else SortKey.DATE_DESC


@dataclass(frozen=True)
class SearchItem:
    slug: str
    title: str
    tags: tuple[Tag, ...]
    first_image: str | None
    score: int


@dataclass(frozen=True)
class SearchResult:
    total: int
    items: tuple[SearchItem, ...]

    def to_jsonable(self) -> dict:
        return {
            "total": self.total,
            "items": [
                {
                    "slug": item.slug,
                    "title": item.title,
                    "tags": [{"name": t.name, "category": t.category.value} for t in item.tags],
                    "first_image": item.first_image,
                    "score": item.score,
                }
                for item in self.items
            ],
        }


def _token_match(query_token: str, candidates: list[str]) -> bool:
    return any(c == query_token or c.startswith(query_token) for c in candidates)


def score(record: ExampleRecord, text_tokens: list[str]) -> int:
    """3 points per token matching the title, 2 the tags, 1 the description.

    A token matches when it equals, or is a prefix of, a candidate token.
    """
    title_tokens = tokenize(record.title)
    tag_tokens = [t for tag in record.tags for t in tokenize(tag.name)]
    description_tokens = tokenize(record.sections.get("description", ""))
    total = 0
    for token in text_tokens:
        if _token_match(token, title_tokens):
            total += TITLE_WEIGHT
        if _token_match(token, tag_tokens):
            total += TAG_WEIGHT
        if _token_match(token, description_tokens):
            total += DESCRIPTION_WEIGHT
    return total


def _matches(record: ExampleRecord, query: SearchQuery, record_score: int) -> bool:
    if query.required_tags:
        names = record.tag_names_folded()
        if any(fold(t) not in names for t in query.required_tags):
            return False
    for flag in query.caps:
        if not getattr(record.capabilities, flag):
            return False
    if query.author is not None:
        needle = fold(query.author)
        if not any(needle in fold(a) for a in record.authors):
            return False
    if query.added_from is not None and record.added < query.added_from:
        return False
    if query.added_to is not None and record.added > query.added_to:
        return False
    if query.text.strip() and record_score <= 0:
        return False
    return True


def _sort_key(record: ExampleRecord, record_score: int, sort: SortKey):
    if sort is SortKey.RELEVANCE:
        return (-record_score, -record.added.toordinal(), record.slug)
    if sort is SortKey.DATE_DESC:
        return (-record.added.toordinal(), record.slug)
    if sort is SortKey.DATE_ASC:
        return (record.added.toordinal(), record.slug)
    return (fold(record.title), record.slug)


def search(catalog: Catalog, query: SearchQuery) -> SearchResult:
    """Evaluate a query against the catalog; empty result is a valid outcome."""
    query.validate()
    text_tokens = tokenize(query.text)
    scored = [(record, score(record, text_tokens)) for record in catalog.records()]
    matched = [(r, s) for r, s in scored if _matches(r, query, s)]
    sort = query.effective_sort
    matched.sort(key=lambda pair: _sort_key(pair[0], pair[1], sort))
    start = query.page * query.page_size
    page = matched[start : start + query.page_size]
    items = tuple(
        SearchItem(
            slug=r.slug,
            title=r.title,
            tags=r.tags,
            first_image=r.images[0] if r.images else None,
            score=s,
        )
        for r, s in page
    )
    return SearchResult(total=len(matched), items=items)


def suggest(catalog: Catalog, prefix: str, limit: int) -> list[str]:
    """Keyword suggestions: tag names plus title tokens of length >= 3.

    Ordered by document frequency (descending), then alphabetically.
    Every suggestion is guaranteed to hit at least one example when used
    as query text.
    """
    if limit < 1:
        raise BadQuery("limit must be >= 1")
    needle = fold(prefix)
    if not needle:
        return []

    # folded form -> (display form, document frequency)
    display: dict[str, str] = {}
    freq: dict[str, int] = {}
    for record in catalog.records():
        seen: set[str] = set()
        for token in tokenize(record.title):
            if len(token) >= 3:
                seen.add(token)
                display.setdefault(token, token)
        for tag in record.tags:
            seen.add(tag.folded)
            display[tag.folded] = tag.name  # curated display form wins
        for folded in seen:
            freq[folded] = freq.get(folded, 0) + 1

    hits = [f for f in freq if f.startswith(needle)]
    hits.sort(key=lambda f: (-freq[f], f))
    return [display[f] for f in hits[:limit]]


def facet_counts(catalog: Catalog, query: SearchQuery) -> dict[str, int]:
    """For every vocabulary tag: result count if it were additionally required.

    Counts honor the query's text/caps/author/date clauses and existing
    required tags; pagination is ignored.
    """
    query.validate()
    text_tokens = tokenize(query.text)
    counts: dict[str, int] = {}
    matched: list[ExampleRecord] = []
    for record in catalog.records():
        if _matches(record, query, score(record, text_tokens)):
            matched.append(record)
    for tag in sorted(catalog.tag_vocabulary, key=lambda t: t.folded):
        folded = tag.folded
        counts[tag.name] = sum(1 for r in matched if folded in r.tag_names_folded())
    return counts
