import type { ApiClient } from "./api.js";
import { AnnotationSession, sizeError } from "./session.js";
import type { Task } from "./types.js";

/** Position labels shown to the rater instead of any variant identity. */
function maskLabel(index: number): string {
  return `Mask ${String.fromCharCode(65 + index)}`;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface ViewHandlers {
  onChange(): void;
  onSubmit(): void;
}

/** Render the current task (or the done screen) into root, replacing it.
 *
 * The DOM only ever sees opaque overlay tokens and positional labels, never
 * variant names — that is the blind-rating guarantee, enforced by the data
 * this module receives rather than by filtering. */
export function renderTask(
  root: HTMLElement,
  session: AnnotationSession,
  api: ApiClient,
  handlers: ViewHandlers,
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  const progress = session.progress;
  const header = el(doc, "p", { class: "progress" }, `Image ${Math.min(progress.done + 1, progress.total)} of ${progress.total}`);
  root.append(header);

  const task = session.current;
  if (!task) {
    root.append(el(doc, "p", { class: "done" }, "All images rated. Thank you."));
    if (session.pendingCount > 0) {
      root.append(el(doc, "p", { class: "pending" }, `${session.pendingCount} rating(s) waiting to reach the server.`));
    }
    return;
  }

  root.append(renderOverlays(doc, task, session, api, handlers));
  root.append(renderSizeForm(doc, task, session, handlers));

  const submit = el(doc, "button", { id: "submit", type: "button" }, "Submit and next");
  submit.disabled = !session.isComplete(task);
  submit.addEventListener("click", handlers.onSubmit);
  root.append(submit);
}

function renderOverlays(
  doc: Document,
  task: Task,
  session: AnnotationSession,
  api: ApiClient,
  handlers: ViewHandlers,
): HTMLElement {
  const row = el(doc, "div", { class: "overlays" });
  const draft = session.draft(task.image);
  task.overlays.forEach((token, i) => {
    const card = el(doc, "figure", { class: "overlay-card", "data-token": token });
    const img = el(doc, "img", { src: api.overlayUrl(task.image, token), alt: maskLabel(i) });
    img.addEventListener("error", () => {
      // failed overlay fetch: offer a retry, never silently skip the task
      const retry = el(doc, "button", { class: "retry", type: "button" }, `Retry ${maskLabel(i)}`);
      retry.addEventListener("click", () => {
        retry.remove();
        img.src = `${api.overlayUrl(task.image, token)}?r=${Date.now()}`;
      });
      card.append(retry);
    });
    card.append(img, el(doc, "figcaption", {}, maskLabel(i)));

    for (const verdict of ["good", "bad"] as const) {
      const btn = el(doc, "button", { class: "verdict", type: "button", "data-verdict": verdict }, verdict);
      if (draft.verdicts[token] === verdict) btn.classList.add("selected");
      btn.addEventListener("click", () => {
        session.setVerdict(task.image, token, verdict);
        handlers.onChange();
      });
      card.append(btn);
    }

    const bestLabel = el(doc, "label", {}, ` best`);
    const best = el(doc, "input", { type: "radio", name: "best", class: "best" }) as HTMLInputElement;
    best.checked = draft.best === token;
    best.addEventListener("change", () => {
      session.setBest(task.image, token);
      handlers.onChange();
    });
    bestLabel.prepend(best);
    card.append(bestLabel);
    row.append(card);
  });
  return row;
}

function renderSizeForm(
  doc: Document,
  task: Task,
  session: AnnotationSession,
  handlers: ViewHandlers,
): HTMLElement {
  const form = el(doc, "div", { class: "sizes" });
  const draft = session.draft(task.image);
  const fields: Array<["height" | "width", number | null]> = [
    ["height", draft.heightMm],
    ["width", draft.widthMm],
  ];
  for (const [name, value] of fields) {
    const label = el(doc, "label", {}, `${name} (mm) `);
    const input = el(doc, "input", {
      type: "number",
      step: "0.1",
      id: `size-${name}`,
    }) as HTMLInputElement;
    if (value !== null) input.value = String(value);
    const error = el(doc, "span", { class: "field-error", id: `error-${name}` }, sizeError(value) ?? "");
    input.addEventListener("input", () => {
      const parsed = input.value === "" ? null : Number(input.value);
      const d = session.draft(task.image);
      session.setSize(
        task.image,
        name === "height" ? parsed : d.heightMm,
        name === "width" ? parsed : d.widthMm,
      );
      error.textContent = sizeError(parsed) ?? "";
      handlers.onChange();
    });
    label.append(input, error);
    form.append(label);
  }
  return form;
}
