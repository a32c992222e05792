// Example detail page: image carousel, preview badge, tag list, markdown
// sections with outline navigation, issue link, package configurator.

import type { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";
import { renderMarkdown } from "../markdown.js";
import type { ExampleDetail, SectionId } from "../types.js";
import { SECTION_IDS } from "../types.js";
import { renderConfigurator, type ConfiguratorCallbacks } from "./configurator.js";
import { tagChip } from "./gallery.js";

export interface DetailCallbacks extends ConfiguratorCallbacks {
  onBack: () => void;
  onToggleTag: (tag: string) => void;
}

const SECTION_TITLES: Record<SectionId, string> = {
  description: "Description",
  instructions: "Instructions",
  limitations: "Limitations",
  references: "References",
  resources: "Resources",
};

function renderCarousel(client: ApiClient, detail: ExampleDetail): HTMLElement {
  const carousel = el("div", { className: "carousel" });
  const img = el("img", {
    className: "carousel-image",
    alt: detail.title,
  }) as HTMLImageElement;
  let index = 0;

  const prev = el("button", { type: "button", className: "carousel-prev", "aria-label": "Previous image" }, ["<"]);
  const next = el("button", { type: "button", className: "carousel-next", "aria-label": "Next image" }, [">"]);
  const counter = el("span", { className: "carousel-counter" });

  const update = () => {
    const name = detail.images[index];
    if (name) img.src = client.imageUrl(detail.slug, name);
    counter.textContent = detail.images.length
      ? `${index + 1} / ${detail.images.length}`
      : "no images";
    if (index <= 0) prev.setAttribute("disabled", "");
    else prev.removeAttribute("disabled");
    if (index >= detail.images.length - 1) next.setAttribute("disabled", "");
    else next.removeAttribute("disabled");
  };
  prev.addEventListener("click", () => {
    if (index > 0) {
      index -= 1;
      update();
    }
  });
  next.addEventListener("click", () => {
    if (index < detail.images.length - 1) {
      index += 1;
      update();
    }
  });
  update();

  carousel.append(prev, img, next, counter);
  return carousel;
}

export function nonEmptySections(detail: ExampleDetail): SectionId[] {
  return SECTION_IDS.filter((id) => (detail.sections[id] ?? "").trim().length > 0);
}

export function renderDetail(
  container: HTMLElement,
  client: ApiClient,
  detail: ExampleDetail,
  callbacks: DetailCallbacks,
): void {
  clear(container);
  const page = el("div", { className: "detail" });

  const back = el("button", { type: "button", className: "back-button" }, ["< Back to gallery"]);
  back.addEventListener("click", callbacks.onBack);
  page.append(back);

  const media = el("div", { className: "detail-media" });
  media.append(renderCarousel(client, detail));
  if (detail.capabilities.preview) {
    media.append(
      el("div", { className: "preview-badge" }, [
        el("span", {}, ["Preview available!"]),
        el("button", { type: "button", className: "preview-show" }, ["Show"]),
      ]),
    );
  }
  page.append(media);

  const head = el("header", { className: "detail-head" });
  head.append(el("h1", {}, [detail.title]));
  head.append(
    el("p", { className: "detail-meta" }, [
      `by ${detail.authors.join(", ")} - added ${detail.added}`,
    ]),
  );
  const tags = el("div", { className: "detail-tags" });
  for (const tag of detail.tags) {
    tags.append(tagChip(tag, false, callbacks.onToggleTag));
  }
  head.append(tags);
  if (detail.issue_url) {
    head.append(
      el("p", { className: "detail-issue" }, [
        el("a", { href: detail.issue_url, rel: "noopener" }, ["Report an issue or ask a question"]),
      ]),
    );
  }
  page.append(head);

  const body = el("div", { className: "detail-body" });
  const sections = el("div", { className: "detail-sections" });
  const outline = el("nav", { className: "outline", "aria-label": "Outline" });
  outline.append(el("h3", {}, ["Contents"]));
  const outlineList = el("ul");

  for (const id of nonEmptySections(detail)) {
    const anchor = `section-${id}`;
    const section = el("section", { id: anchor, className: "prose-section" });
    section.append(el("h2", {}, [SECTION_TITLES[id]]));
    const prose = el("div", { className: "prose" });
    prose.innerHTML = renderMarkdown(detail.sections[id]);
    section.append(prose);
    sections.append(section);
    outlineList.append(
      el("li", {}, [el("a", { href: `#${anchor}`, "data-outline": id }, [SECTION_TITLES[id]])]),
    );
  }
  outline.append(outlineList);

  body.append(sections, outline);
  page.append(body);

  const configuratorHost = el("div", { className: "configurator-host" });
  renderConfigurator(configuratorHost, detail, callbacks);
  page.append(configuratorHost);

  container.append(page);
}
