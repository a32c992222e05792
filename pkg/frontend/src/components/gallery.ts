// Card grid of search results: first image, title, category-colored tags.

import type { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";
import type { SearchResult, TagRef } from "../types.js";

export interface GalleryCallbacks {
  onOpen: (slug: string) => void;
  onToggleTag: (tag: string) => void;
}

const CATEGORY_CLASSES: Record<TagRef["category"], string> = {
  DataType: "tag tag-datatype",
  Technique: "tag tag-technique",
  Domain: "tag tag-domain",
};

export function tagChip(
  tag: TagRef,
  selected: boolean,
  onToggle?: (name: string) => void,
  count?: number,
): HTMLElement {
  const label = count === undefined ? tag.name : `${tag.name} (${count})`;
  const chip = el(
    "button",
    {
      type: "button",
      className: CATEGORY_CLASSES[tag.category] + (selected ? " tag-selected" : ""),
      "data-tag": tag.name,
      "aria-pressed": selected ? "true" : "false",
    },
    [label],
  );
  if (onToggle) {
    chip.addEventListener("click", (ev) => {
      ev.stopPropagation();
      onToggle(tag.name);
    });
  }
  return chip;
}

export function renderGallery(
  container: HTMLElement,
  client: ApiClient,
  result: SearchResult,
  selectedTags: string[],
  callbacks: GalleryCallbacks,
): void {
  clear(container);
  if (result.items.length === 0) {
    container.append(
      el("p", { className: "empty-state" }, [
        "No examples match the current search and filters.",
      ]),
    );
    return;
  }
  const grid = el("div", { className: "card-grid" });
  for (const item of result.items) {
    const card = el("article", { className: "card", "data-slug": item.slug });
    if (item.first_image) {
      card.append(
        el("img", {
          className: "card-image",
          src: client.imageUrl(item.slug, item.first_image),
          alt: item.title,
          loading: "lazy",
        }),
      );
    } else {
      card.append(el("div", { className: "card-image card-image-missing", "aria-hidden": "true" }));
    }
    card.append(el("h3", { className: "card-title" }, [item.title]));
    const tags = el("div", { className: "card-tags" });
    for (const tag of item.tags) {
      tags.append(tagChip(tag, selectedTags.includes(tag.name), callbacks.onToggleTag));
    }
    card.append(tags);
    card.addEventListener("click", () => callbacks.onOpen(item.slug));
    grid.append(card);
  }
  container.append(grid);
}

export function renderPager(
  container: HTMLElement,
  total: number,
  page: number,
  pageSize: number,
  onPage: (page: number) => void,
): void {
  clear(container);
  const pages = Math.max(1, Math.ceil(total / pageSize));
  if (pages <= 1) return;
  const prev = el("button", { type: "button", className: "pager-prev" }, ["Previous"]);
  const next = el("button", { type: "button", className: "pager-next" }, ["Next"]);
  if (page <= 0) prev.setAttribute("disabled", "");
  if (page >= pages - 1) next.setAttribute("disabled", "");
  prev.addEventListener("click", () => onPage(page - 1));
  next.addEventListener("click", () => onPage(page + 1));
  container.append(prev, el("span", { className: "pager-label" }, [`Page ${page + 1} of ${pages}`]), next);
}
