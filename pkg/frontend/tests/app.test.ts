// Mock-API tests of the assembled app: the gallery renders exactly what
// the API returned, chip toggles re-query the server (no client-side
// filtering), and the URL mirrors every state change.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, PAGE_SIZE } from "../src/app.js";
import { decodeState, searchParams } from "../src/state.js";
import { mockApi, SEED_SEARCH, SEED_TAGS, type MockApi } from "./mock-api.js";

function renderedSlugs(root: HTMLElement): string[] {
  return [...root.querySelectorAll<HTMLElement>(".card")].map((c) => c.dataset["slug"]!);
}

async function settle(): Promise<void> {
  for (let i = 0; i < 4; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

interface Harness {
  root: HTMLElement;
  app: App;
  mock: MockApi;
  urls: string[];
  downloads: { name: string; payload: ArrayBuffer }[];
}

async function mount(initialQuery = ""): Promise<Harness> {
  const root = document.createElement("div");
  document.body.append(root);
  const mock = mockApi();
  const urls: string[] = [initialQuery];
  const downloads: { name: string; payload: ArrayBuffer }[] = [];
  const app = new App(root, new ApiClient("", mock.fetchFn), {
    readQuery: () => urls[urls.length - 1]!,
    pushQuery: (qs) => urls.push(qs),
    saveFile: (name, payload) => downloads.push({ name, payload }),
  });
  await app.start();
  await settle();
  return { root, app, mock, urls, downloads };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("gallery view", () => {
  it("renders one card per API item", async () => {
    const { root, app } = await mount();
    const expected = app["client"] ? SEED_SEARCH.items.length : 0;
    expect(renderedSlugs(root)).toHaveLength(expected);
  });

  it("shows results exactly as the API returned them (no client-side filtering)", async () => {
    const { root, app, mock } = await mount();
    const expected = mock.searchFor(searchParams(app.state, PAGE_SIZE));
    expect(renderedSlugs(root)).toEqual(expected.items.map((item) => item.slug));
  });

  it("tag chip toggle narrows via the server and is an involution", async () => {
    const { root, mock } = await mount();
    const before = renderedSlugs(root);

    const chip = root.querySelector<HTMLButtonElement>('.sidebar [data-tag="CFD"]');
    expect(chip).not.toBeNull();
    chip!.click();
    await settle();
    const narrowed = renderedSlugs(root);
    expect(narrowed.length).toBeLessThanOrEqual(before.length);
    const expected = mock.searchFor(new URLSearchParams({ tags: "CFD" }));
    expect(narrowed).toEqual(expected.items.map((item) => item.slug));

    root.querySelector<HTMLButtonElement>('.sidebar [data-tag="CFD"]')!.click();
    await settle();
    expect(renderedSlugs(root)).toEqual(before);
  });

  it("mirrors every state change into the URL and back", async () => {
    const { root, urls } = await mount();
    root.querySelector<HTMLButtonElement>('.sidebar [data-tag="CFD"]')!.click();
    await settle();
    expect(urls[urls.length - 1]).toBe("tags=CFD");

    const checkbox = root.querySelector<HTMLInputElement>('[data-cap="mpi"]');
    checkbox!.click();
    await settle();
    const latest = urls[urls.length - 1]!;
    expect(decodeState(latest).caps).toEqual(["mpi"]);
    expect(decodeState(latest).tags).toEqual(["CFD"]);
  });

  it("restores a bookmarked view from the query string", async () => {
    const { app } = await mount("q=vector&tags=CFD&caps=mpi&sort=date-desc&page=0");
    expect(app.state.query).toBe("vector");
    expect(app.state.tags).toEqual(["CFD"]);
    expect(app.state.caps).toEqual(["mpi"]);
    expect(app.state.sort).toBe("date-desc");
  });

  it("shows an empty state when nothing matches", async () => {
    const { root } = await mount("q=zzzznothing");
    expect(root.querySelector(".empty-state")).not.toBeNull();
    expect(renderedSlugs(root)).toHaveLength(0);
  });
});

describe("search requests", () => {
  it("keeps at most one search in flight (latest wins)", async () => {
    const mock = mockApi();
    const aborted: string[] = [];
    let release: (() => void) | null = null;

    const gatedFetch: typeof mock.fetchFn = (input, init) => {
      if (input.includes("/api/examples?") && !release) {
        // first search hangs until aborted or released
        return new Promise((resolve, reject) => {
          release = () => resolve(mock.fetchFn(input, init));
          init?.signal?.addEventListener("abort", () => {
            aborted.push(input);
            reject(new DOMException("aborted", "AbortError"));
          });
        });
      }
      return mock.fetchFn(input, init);
    };

    const root = document.createElement("div");
    document.body.append(root);
    const urls: string[] = [""];
    const app = new App(root, new ApiClient("", gatedFetch), {
      readQuery: () => urls[urls.length - 1]!,
      pushQuery: (qs) => urls.push(qs),
    });
    const first = app.start();
    await new Promise((resolve) => setTimeout(resolve, 0));
    await app.navigate({ ...app.state, query: "vector" });
    await first;
    await settle();
    expect(aborted).toHaveLength(1);
    expect(renderedSlugs(root).length).toBeGreaterThan(0);
  });
});

describe("guide pages", () => {
  it("renders a guide route from static markdown", async () => {
    const { root, urls } = await mount();
    root.querySelector<HTMLAnchorElement>('[data-guide="contributing"]')!.click();
    await settle();
    expect(decodeState(urls[urls.length - 1]!).guide).toBe("contributing");
    expect(root.querySelector(".guide-page h1")?.textContent).toBe("Guide");

    root.querySelector<HTMLButtonElement>(".back-button")!.click();
    await settle();
    expect(root.querySelector(".card-grid")).not.toBeNull();
  });
});

describe("sidebar", () => {
  it("tag chips show the counts served by /api/tags", async () => {
    const { root } = await mount();
    const cfd = SEED_TAGS.find((t) => t.name === "CFD")!;
    const chip = root.querySelector('.sidebar [data-tag="CFD"]')!;
    expect(chip.textContent).toBe(`CFD (${cfd.count})`);
  });
});

describe("detail view", () => {
  it("opens an example card into the detail view", async () => {
    const { root, urls } = await mount();
    const card = root.querySelector<HTMLElement>('[data-slug="vector-glyphs-fluid-flow"]');
    card!.click();
    await settle();
    expect(root.querySelector(".detail")).not.toBeNull();
    expect(decodeState(urls[urls.length - 1]!).example).toBe("vector-glyphs-fluid-flow");

    root.querySelector<HTMLButtonElement>(".back-button")!.click();
    await settle();
    expect(root.querySelector(".card-grid")).not.toBeNull();
    expect(decodeState(urls[urls.length - 1]!).example).toBeNull();
  });

  it("downloads a bundle through the configurator", async () => {
    const { root, downloads } = await mount("example=vector-glyphs-fluid-flow");
    const form = root.querySelector<HTMLFormElement>("form.configurator");
    expect(form).not.toBeNull();
    form!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await settle();
    expect(downloads).toHaveLength(1);
    expect(downloads[0]!.name).toBe("vector-glyphs-fluid-flow-bundle.tar.gz");
    expect(downloads[0]!.payload.byteLength).toBeGreaterThan(0);
  });
});
