// Filter sidebar: tag chips with facet counts grouped by category, author
// and date filters, capability checkboxes. Toggling anything re-queries
// the server; nothing is filtered client-side.

import { clear, el } from "../dom.js";
import type { GalleryState } from "../state.js";
import type { CapabilityFlag, TagCategory, TagInfo } from "../types.js";
import { CAPABILITY_FLAGS } from "../types.js";
import { tagChip } from "./gallery.js";

export interface SidebarCallbacks {
  onToggleTag: (tag: string) => void;
  onToggleCap: (flag: CapabilityFlag) => void;
  onAuthor: (author: string) => void;
  onDateRange: (from: string, to: string) => void;
}

const CATEGORY_LABELS: [TagCategory, string][] = [
  ["DataType", "Data type"],
  ["Technique", "Technique"],
  ["Domain", "Domain"],
];

const CAPABILITY_LABELS: Record<CapabilityFlag, string> = {
  preview: "Interactive preview",
  mpi: "Runs with MPI",
  slurm: "Runs via Slurm",
  dataset_replaceable: "Accepts own dataset",
};

export function renderSidebar(
  container: HTMLElement,
  tags: TagInfo[],
  state: GalleryState,
  callbacks: SidebarCallbacks,
): void {
  clear(container);
  container.append(el("h2", {}, ["Filters"]));

  for (const [category, label] of CATEGORY_LABELS) {
    const inCategory = tags.filter((t) => t.category === category);
    if (!inCategory.length) continue;
    const group = el("div", { className: "filter-group", "data-category": category });
    group.append(el("h3", {}, [label]));
    const chips = el("div", { className: "filter-tags" });
    for (const tag of inCategory) {
      chips.append(tagChip(tag, state.tags.includes(tag.name), callbacks.onToggleTag, tag.count));
    }
    group.append(chips);
    container.append(group);
  }

  const capsGroup = el("div", { className: "filter-group filter-caps" });
  capsGroup.append(el("h3", {}, ["Requirements"]));
  for (const flag of CAPABILITY_FLAGS) {
    const checkbox = el("input", {
      type: "checkbox",
      id: `cap-${flag}`,
      "data-cap": flag,
    }) as HTMLInputElement;
    checkbox.checked = state.caps.includes(flag);
    checkbox.addEventListener("change", () => callbacks.onToggleCap(flag));
    capsGroup.append(
      el("label", { className: "cap-row", for: `cap-${flag}` }, [
        checkbox,
        CAPABILITY_LABELS[flag],
      ]),
    );
  }
  container.append(capsGroup);

  const authorGroup = el("div", { className: "filter-group" });
  authorGroup.append(el("h3", {}, ["Author"]));
  const authorInput = el("input", {
    type: "text",
    className: "author-input",
    placeholder: "Name contains...",
  }) as HTMLInputElement;
  authorInput.value = state.author;
  authorInput.addEventListener("change", () => callbacks.onAuthor(authorInput.value.trim()));
  authorGroup.append(authorInput);
  container.append(authorGroup);

  const dateGroup = el("div", { className: "filter-group" });
  dateGroup.append(el("h3", {}, ["Added between"]));
  const fromInput = el("input", { type: "date", className: "date-from" }) as HTMLInputElement;
  const toInput = el("input", { type: "date", className: "date-to" }) as HTMLInputElement;
  fromInput.value = state.addedFrom;
  toInput.value = state.addedTo;
  const emit = () => callbacks.onDateRange(fromInput.value, toInput.value);
  fromInput.addEventListener("change", emit);
  toInput.addEventListener("change", emit);
  dateGroup.append(fromInput, toInput);
  container.append(dateGroup);
}
