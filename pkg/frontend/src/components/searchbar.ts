// Search input with a debounced suggestion dropdown; picking a suggestion
// (or pressing Enter) submits the query.

import type { ApiClient } from "../api.js";
import { clear, debounce, el } from "../dom.js";
import type { SortKey } from "../types.js";
import { SORT_KEYS } from "../types.js";

export interface SearchBarCallbacks {
  onSubmit: (text: string) => void;
  onSort: (sort: SortKey | "") => void;
}

const SORT_LABELS: Record<SortKey, string> = {
  relevance: "Relevance",
  "date-desc": "Newest first",
  "date-asc": "Oldest first",
  "title-asc": "Title A-Z",
};

export function renderSearchBar(
  container: HTMLElement,
  client: ApiClient,
  initialText: string,
  initialSort: SortKey | "",
  callbacks: SearchBarCallbacks,
  debounceMs = 150,
): void {
  clear(container);
  const input = el("input", {
    type: "search",
    className: "search-input",
    placeholder: "Search visualization examples...",
    "aria-label": "Search",
  }) as HTMLInputElement;
  input.value = initialText;

  const dropdown = el("ul", { className: "suggestions", hidden: true });

  const hideDropdown = () => {
    dropdown.setAttribute("hidden", "");
    clear(dropdown);
  };

  const showSuggestions = (suggestions: string[]) => {
    clear(dropdown);
    if (!suggestions.length) {
      dropdown.setAttribute("hidden", "");
      return;
    }
    for (const suggestion of suggestions) {
      const item = el("li", { className: "suggestion" }, [suggestion]);
      // mousedown so selection wins over the input's blur
      item.addEventListener("mousedown", (ev) => {
        ev.preventDefault();
        input.value = suggestion;
        hideDropdown();
        callbacks.onSubmit(suggestion);
      });
      dropdown.append(item);
    }
    dropdown.removeAttribute("hidden");
  };

  let pending: AbortController | null = null;
  const fetchSuggestions = debounce((prefix: string) => {
    pending?.abort();
    if (!prefix) {
      hideDropdown();
      return;
    }
    pending = new AbortController();
    client
      .suggest(prefix, 8, pending.signal)
      .then(showSuggestions)
      .catch(() => undefined); // aborted or transient: keep the dropdown as is
  }, debounceMs);

  input.addEventListener("input", () => fetchSuggestions(input.value.trim()));
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      hideDropdown();
      callbacks.onSubmit(input.value.trim());
    } else if (ev.key === "Escape") {
      hideDropdown();
    }
  });
  input.addEventListener("blur", () => setTimeout(hideDropdown, 120));

  const sortSelect = el("select", { className: "sort-select", "aria-label": "Sort" }) as HTMLSelectElement;
  sortSelect.append(el("option", { value: "" }, ["Default order"]));
  for (const key of SORT_KEYS) {
    sortSelect.append(el("option", { value: key }, [SORT_LABELS[key]]));
  }
  sortSelect.value = initialSort;
  sortSelect.addEventListener("change", () =>
    callbacks.onSort(sortSelect.value as SortKey | ""),
  );

  const wrap = el("div", { className: "search-wrap" }, [input, dropdown]);
  container.append(wrap, sortSelect);
}
