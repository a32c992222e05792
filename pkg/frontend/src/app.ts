// Application shell: owns the state, keeps it mirrored in the URL query
// string, fetches from the API, and delegates rendering to the components.
// At most one search request is in flight; newer input aborts older calls.

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import { renderDetail } from "./components/detail.js";
import { renderMarkdown } from "./markdown.js";
import { renderGallery, renderPager } from "./components/gallery.js";
import { renderSearchBar } from "./components/searchbar.js";
import { renderSidebar } from "./components/sidebar.js";
import {
  decodeState,
  defaultState,
  encodeState,
  normalizeState,
  searchParams,
  toggleCap,
  toggleTag,
  type GalleryState,
} from "./state.js";
import type { PackageConfig } from "./types.js";

export const PAGE_SIZE = 30;

export interface AppOptions {
  /** Override for tests; defaults to the real browser location/history. */
  readQuery?: () => string;
  pushQuery?: (queryString: string) => void;
  saveFile?: (name: string, payload: ArrayBuffer) => void;
}

function browserSaveFile(name: string, payload: ArrayBuffer): void {
  const blob = new Blob([payload], { type: "application/gzip" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = name;
  document.body.append(link);
  link.click();
  link.remove();
  URL.revokeObjectURL(url);
}

export class App {
  state: GalleryState = defaultState();
  private inFlight: AbortController | null = null;
  private readonly readQuery: () => string;
  private readonly pushQuery: (qs: string) => void;
  private readonly saveFile: (name: string, payload: ArrayBuffer) => void;

  private readonly topbar: HTMLElement;
  private readonly sidebar: HTMLElement;
  private readonly main: HTMLElement;
  private readonly pager: HTMLElement;
  private readonly notice: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly client: ApiClient,
    options: AppOptions = {},
  ) {
    this.readQuery = options.readQuery ?? (() => window.location.search);
    this.pushQuery =
      options.pushQuery ??
      ((qs) => window.history.pushState(null, "", qs ? `?${qs}` : window.location.pathname));
    this.saveFile = options.saveFile ?? browserSaveFile;

    clear(root);
    this.notice = el("div", { className: "notice", role: "status" });
    this.topbar = el("header", { className: "topbar" });
    this.sidebar = el("aside", { className: "sidebar" });
    this.main = el("main", { className: "content" });
    this.pager = el("nav", { className: "pager" });
    root.append(
      this.notice,
      this.topbar,
      el("div", { className: "layout" }, [
        this.sidebar,
        el("div", { className: "results" }, [this.main, this.pager]),
      ]),
    );
  }

  async start(): Promise<void> {
    window.addEventListener("popstate", () => {
      this.state = decodeState(this.readQuery());
      void this.render();
    });
    this.state = decodeState(this.readQuery());
    await this.render();
  }

  /** Apply a state change, encode it into the URL, and re-render. */
  async navigate(next: GalleryState): Promise<void> {
    this.state = normalizeState(next);
    this.pushQuery(encodeState(this.state));
    await this.render();
  }

  async render(): Promise<void> {
    this.notice.textContent = "";
    try {
      if (this.state.guide) {
        await this.renderGuideView(this.state.guide);
      } else if (this.state.example) {
        await this.renderDetailView(this.state.example);
      } else {
        await this.renderGalleryView();
      }
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      this.notice.textContent = `Something went wrong - ${message}`;
    }
  }

  private callbacks() {
    return {
      onToggleTag: (tag: string) =>
        void this.navigate({ ...toggleTag(this.state, tag), example: null }),
      onToggleCap: (flag: Parameters<typeof toggleCap>[1]) =>
        void this.navigate(toggleCap(this.state, flag)),
      onAuthor: (author: string) => void this.navigate({ ...this.state, author, page: 0 }),
      onDateRange: (addedFrom: string, addedTo: string) =>
        void this.navigate({ ...this.state, addedFrom, addedTo, page: 0 }),
      onSubmit: (query: string) =>
        void this.navigate({ ...this.state, query, page: 0, guide: null, example: null }),
      onSort: (sort: GalleryState["sort"]) => void this.navigate({ ...this.state, sort, page: 0 }),
      onOpen: (slug: string) => void this.navigate({ ...this.state, example: slug, guide: null }),
      onBack: () => void this.navigate({ ...this.state, example: null }),
      onPage: (page: number) => void this.navigate({ ...this.state, page }),
      onDownload: (slug: string, config: PackageConfig) => void this.download(slug, config),
    };
  }

  private renderTopbar(callbacks: ReturnType<App["callbacks"]>): void {
    renderSearchBar(this.topbar, this.client, this.state.query, this.state.sort, callbacks);
    const nav = el("nav", { className: "guide-nav" });
    const pages: [string, string][] = [
      ["about", "About"],
      ["example-structure", "Example structure"],
      ["contributing", "Contributing"],
    ];
    for (const [name, label] of pages) {
      const link = el("a", { href: `?guide=${name}`, "data-guide": name }, [label]);
      link.addEventListener("click", (ev) => {
        ev.preventDefault();
        void this.navigate({ ...this.state, guide: name, example: null });
      });
      nav.append(link);
    }
    this.topbar.append(nav);
  }

  private async renderGuideView(name: string): Promise<void> {
    this.renderTopbar(this.callbacks());
    clear(this.sidebar);
    clear(this.pager);
    const text = await this.client.getGuide(name);
    clear(this.main);
    const back = el("button", { type: "button", className: "back-button" }, ["< Back to gallery"]);
    back.addEventListener("click", () => void this.navigate({ ...this.state, guide: null }));
    const prose = el("div", { className: "prose guide-page" });
    prose.innerHTML = renderMarkdown(text);
    this.main.append(back, prose);
  }

  private async renderGalleryView(): Promise<void> {
    const callbacks = this.callbacks();
    this.renderTopbar(callbacks);

    this.inFlight?.abort();
    this.inFlight = new AbortController();
    const [result, tags] = await Promise.all([
      this.client.searchExamples(searchParams(this.state, PAGE_SIZE), this.inFlight.signal),
      this.client.getTags(),
    ]);
    renderSidebar(this.sidebar, tags, this.state, callbacks);
    renderGallery(this.main, this.client, result, this.state.tags, callbacks);
    renderPager(this.pager, result.total, this.state.page, PAGE_SIZE, callbacks.onPage);
  }

  private async renderDetailView(slug: string): Promise<void> {
    const callbacks = this.callbacks();
    this.renderTopbar(callbacks);
    clear(this.sidebar);
    clear(this.pager);
    const detail = await this.client.getExample(slug);
    renderDetail(this.main, this.client, detail, {
      ...callbacks,
      onToggleTag: (tag: string) =>
        void this.navigate({ ...toggleTag(this.state, tag), example: null }),
    });
  }

  private async download(slug: string, config: PackageConfig): Promise<void> {
    const status = this.main.querySelector(".configurator-status");
    try {
      if (status) status.textContent = "Building your bundle...";
      const payload = await this.client.downloadPackage(slug, config);
      this.saveFile(`${slug}-bundle.tar.gz`, payload);
      if (status) status.textContent = "Bundle downloaded.";
    } catch (err) {
      const message = err instanceof ApiError ? err.message : String(err);
      if (status) status.textContent = `Could not build the bundle: ${message}`;
    }
  }
}
