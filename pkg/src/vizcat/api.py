"""HTTP surface over the catalog: browse, search, suggest, assets, packaging.

Every read endpoint is a thin canonical-JSON serializer over a library
operation, so API bodies can be compared byte-for-byte against direct
library calls. The service never writes examples; the only mutation is
an atomic catalog-snapshot swap through the token-gated reload endpoint.

Configuration (CLI flags take precedence over environment):
  VIZCAT_ROOT         catalog root directory
  VIZCAT_PORT         listen port (default 8080)
  VIZCAT_ADMIN_TOKEN  bearer token enabling POST /api/reload
  VIZCAT_CORS_ORIGIN  allowed origin (default: allow all, dev mode)
  VIZCAT_STATIC       optional directory of static web assets to serve
"""

from __future__ import annotations

import hmac
import mimetypes
import tempfile
import threading
from datetime import date
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .catalog import record_to_jsonable, scan_repository
from .jsonutil import canonical_json
from .model import Catalog
from .packager import (
    CapabilityMismatch,
    InvalidConfig,
    OutDirNotEmpty,
    archive_bundle,
    assemble_bundle,
    config_from_jsonable,
)
from .search import (
    BadQuery,
    MAX_PAGE_SIZE,
    DEFAULT_PAGE_SIZE,
    SearchQuery,
    SortKey,
    facet_counts,
    search,
    suggest,
)

SUGGEST_MAX_LIMIT = 50
SUGGEST_DEFAULT_LIMIT = 10


def _json_response(payload, status: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status,
        media_type="application/json",
    )


def _error(status: int, code: str, message: str) -> Response:
    return _json_response({"status": status, "code": code, "message": message}, status)


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise BadQuery(f"{name} must be an integer") from None


def _parse_date(raw: str, name: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise BadQuery(f"{name} must be a YYYY-MM-DD date") from None


def _parse_csv(raw: str) -> frozenset[str]:
    return frozenset(part.strip() for part in raw.split(",") if part.strip())


def query_from_params(params) -> SearchQuery:
    """Build a SearchQuery from request query params; raises BadQuery."""
    sort = None
    if params.get("sort") is not None:
        try:
            sort = SortKey(params["sort"])
        except ValueError:
            raise BadQuery(f"unknown sort {params['sort']!r}") from None
    query = SearchQuery(
        text=params.get("q", ""),
        required_tags=_parse_csv(params.get("tags", "")),
        author=params.get("author"),
        added_from=_parse_date(params["from"], "from") if params.get("from") else None,
        added_to=_parse_date(params["to"], "to") if params.get("to") else None,
        caps=_parse_csv(params.get("caps", "")),
        sort=sort,
        page=_parse_int(params.get("page", "0"), "page"),
        page_size=_parse_int(params.get("page_size", str(DEFAULT_PAGE_SIZE)), "page_size"),
    )
    query.validate()
    return query


class CatalogState:
    """Holds the current immutable catalog snapshot; swap is atomic."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._catalog, _ = scan_repository(self.root)

    @property
    def catalog(self) -> Catalog:
        return self._catalog

    def reload(self) -> Catalog:
        fresh, _ = scan_repository(self.root)
        with self._lock:
            self._catalog = fresh
        return fresh


def create_app(
    root: Path,
    admin_token: str | None = None,
    cors_origin: str | None = None,
    static_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="vizcat", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = CatalogState(root)
    app.state.catalog_state = state

    @app.get("/api/health")
    def health() -> Response:
        return _json_response({"status": "ok", "examples": len(state.catalog)})

    @app.get("/api/examples")
    def list_examples(request: Request) -> Response:
        try:
            query = query_from_params(request.query_params)
        except BadQuery as exc:
            return _error(400, "bad-query", str(exc))
        result = search(state.catalog, query)
        return _json_response(result.to_jsonable())

    @app.get("/api/examples/{slug}")
    def get_example(slug: str) -> Response:
        record = state.catalog.get(slug)
        if record is None:
            return _error(404, "not-found", f"no example {slug!r}")
        return _json_response(record_to_jsonable(record))

    @app.get("/api/examples/{slug}/images/{name:path}")
    def get_image(slug: str, name: str) -> Response:
        record = state.catalog.get(slug)
        if record is None:
            return _error(404, "not-found", f"no example {slug!r}")
        if record.source_dir is None:
            return _error(404, "not-found", "example has no assets")
        images_dir = (record.source_dir / "images").resolve()
        candidate = (images_dir / name).resolve()
        if not str(candidate).startswith(str(images_dir) + "/") or ".." in Path(name).parts or Path(name).is_absolute():
            return _error(403, "bad-query", "image path escapes the example folder")
        if name not in record.images or not candidate.is_file():
            return _error(404, "not-found", f"no image {name!r}")
        media_type = mimetypes.guess_type(name)[0] or "application/octet-stream"
        return Response(content=candidate.read_bytes(), media_type=media_type)

    @app.get("/api/tags")
    def list_tags(request: Request) -> Response:
        catalog = state.catalog
        counts = facet_counts(catalog, SearchQuery())
        tags = sorted(catalog.tag_vocabulary, key=lambda t: (t.folded, t.category.value))
        payload = [
            {"name": t.name, "category": t.category.value, "count": counts.get(t.name, 0)}
            for t in tags
        ]
        return _json_response(payload)

    @app.get("/api/suggest")
    def get_suggestions(request: Request) -> Response:
        prefix = request.query_params.get("prefix", "")
        if not prefix:
            return _error(400, "bad-query", "prefix must be at least one character")
        raw_limit = request.query_params.get("limit", str(SUGGEST_DEFAULT_LIMIT))
        try:
            limit = _parse_int(raw_limit, "limit")
        except BadQuery as exc:
            return _error(400, "bad-query", str(exc))
        if not 1 <= limit <= SUGGEST_MAX_LIMIT:
            return _error(400, "bad-query", f"limit must be in 1..{SUGGEST_MAX_LIMIT}")
        return _json_response(suggest(state.catalog, prefix, limit))

    @app.post("/api/package")
    async def package(request: Request) -> Response:
        try:
            body = await request.json()
        except Exception:
            return _error(400, "invalid-config", "request body must be JSON")
        if not isinstance(body, dict) or not isinstance(body.get("slug"), str):
            return _error(400, "invalid-config", "body must carry slug and config")
        record = state.catalog.get(body["slug"])
        if record is None:
            return _error(404, "not-found", f"no example {body['slug']!r}")
        try:
            config = config_from_jsonable(body.get("config") or {})
            with tempfile.TemporaryDirectory(prefix="vizcat-pkg-") as tmp:
                bundle = assemble_bundle(record, config, Path(tmp) / "bundle")
                payload = archive_bundle(bundle)
        except InvalidConfig as exc:
            return _error(400, "invalid-config", str(exc))
        except CapabilityMismatch as exc:
            return _error(409, "capability-mismatch", str(exc))
        except (OutDirNotEmpty, OSError) as exc:
            return _error(500, "internal", str(exc))
        return Response(
            content=payload,
            media_type="application/gzip",
            headers={
                "Content-Disposition": f'attachment; filename="{record.slug}-bundle.tar.gz"'
            },
        )

    @app.post("/api/reload")
    def reload(request: Request) -> Response:
        # The endpoint stays hidden (404) unless a valid token is presented.
        auth = request.headers.get("authorization", "")
        presented = auth.removeprefix("Bearer ").strip() if auth.startswith("Bearer ") else ""
        if not admin_token or not presented or not hmac.compare_digest(presented, admin_token):
            return _error(404, "not-found", "not found")
        fresh = state.reload()
        return _json_response({"status": "ok", "examples": len(fresh)})

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
