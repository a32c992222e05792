// Gallery state <-> URL query string. The whole view is encoded in the
// query string so every screen is shareable and reloading reproduces it.

import { CAPABILITY_FLAGS, SORT_KEYS } from "./types.js";
import type { CapabilityFlag, SortKey } from "./types.js";

export interface GalleryState {
  query: string;
  tags: string[]; // selected required tags, kept sorted
  author: string;
  addedFrom: string; // "" or YYYY-MM-DD
  addedTo: string;
  caps: CapabilityFlag[]; // kept in canonical flag order
  sort: SortKey | ""; // "" lets the server pick its default
  page: number;
  example: string | null; // detail view when set
  guide: string | null; // static guide page when set
}

export function defaultState(): GalleryState {
  return {
    query: "",
    tags: [],
    author: "",
    addedFrom: "",
    addedTo: "",
    caps: [],
    sort: "",
    page: 0,
    example: null,
    guide: null,
  };
}

const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;

function canonicalCaps(flags: Iterable<string>): CapabilityFlag[] {
  const wanted = new Set(flags);
  return CAPABILITY_FLAGS.filter((flag) => wanted.has(flag));
}

export function normalizeState(state: GalleryState): GalleryState {
  return {
    ...state,
    tags: [...new Set(state.tags)].sort(),
    caps: canonicalCaps(state.caps),
    page: Math.max(0, Math.floor(state.page)),
  };
}

/** Encode as a query string; defaults are omitted so URLs stay short. */
export function encodeState(state: GalleryState): string {
  const s = normalizeState(state);
  const params = new URLSearchParams();
  if (s.guide) params.set("guide", s.guide);
  if (s.example) params.set("example", s.example);
  if (s.query) params.set("q", s.query);
  if (s.tags.length) params.set("tags", s.tags.join(","));
  if (s.author) params.set("author", s.author);
  if (s.addedFrom) params.set("from", s.addedFrom);
  if (s.addedTo) params.set("to", s.addedTo);
  if (s.caps.length) params.set("caps", s.caps.join(","));
  if (s.sort) params.set("sort", s.sort);
  if (s.page > 0) params.set("page", String(s.page));
  return params.toString();
}

export function decodeState(queryString: string): GalleryState {
  const params = new URLSearchParams(queryString);
  const state = defaultState();
  state.example = params.get("example");
  const guide = params.get("guide") ?? "";
  state.guide = /^[a-z0-9-]+$/.test(guide) ? guide : null;
  state.query = params.get("q") ?? "";
  state.tags = [...new Set((params.get("tags") ?? "").split(",").filter(Boolean))].sort();
  state.author = params.get("author") ?? "";
  const from = params.get("from") ?? "";
  state.addedFrom = DATE_RE.test(from) ? from : "";
  const to = params.get("to") ?? "";
  state.addedTo = DATE_RE.test(to) ? to : "";
  state.caps = canonicalCaps((params.get("caps") ?? "").split(",").filter(Boolean));
  const sort = params.get("sort") ?? "";
  state.sort = (SORT_KEYS as readonly string[]).includes(sort) ? (sort as SortKey) : "";
  const page = Number.parseInt(params.get("page") ?? "0", 10);
  state.page = Number.isFinite(page) && page > 0 ? page : 0;
  return state;
}

export function toggleTag(state: GalleryState, tag: string): GalleryState {
  const tags = state.tags.includes(tag)
    ? state.tags.filter((t) => t !== tag)
    : [...state.tags, tag];
  return normalizeState({ ...state, tags, page: 0 });
}

export function toggleCap(state: GalleryState, flag: CapabilityFlag): GalleryState {
  const caps = state.caps.includes(flag)
    ? state.caps.filter((c) => c !== flag)
    : [...state.caps, flag];
  return normalizeState({ ...state, caps, page: 0 });
}

/** Query parameters for GET /api/examples (pagination handled by caller). */
export function searchParams(state: GalleryState, pageSize: number): URLSearchParams {
  const s = normalizeState(state);
  const params = new URLSearchParams();
  if (s.query) params.set("q", s.query);
  if (s.tags.length) params.set("tags", s.tags.join(","));
  if (s.author) params.set("author", s.author);
  if (s.addedFrom) params.set("from", s.addedFrom);
  if (s.addedTo) params.set("to", s.addedTo);
  if (s.caps.length) params.set("caps", s.caps.join(","));
  if (s.sort) params.set("sort", s.sort);
  params.set("page", String(s.page));
  params.set("page_size", String(pageSize));
  return params;
}
