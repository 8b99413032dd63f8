// One stage per screen: render the service-provided candidates, enforce the
// selection requirement on the submit control, and walk forward on success.
// No back navigation: submitted stages are frozen server-side.

import { ApiClient, ServiceError, freshToken } from "./api.js";
import {
  StageView,
  buildStageView,
  canSubmit,
  requirementText,
  stageTitle,
  toggleDefective,
  toggleSelected,
} from "./stageView.js";
import type { SessionView } from "./types.js";

export interface WizardCallbacks {
  onAdvanced(session: SessionView): void;
  onCompleted(session: SessionView): void;
  onSessionExpired(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderStageScreen(
  root: HTMLElement,
  client: ApiClient,
  session: SessionView,
  callbacks: WizardCallbacks,
): StageView {
  const view = buildStageView(session);
  // one token per rendered screen: a double click or a network retry of this
  // screen's submit can only ever apply once server-side
  const token = freshToken(view.sessionId, view.stage.number);
  let inFlight = false;

  root.innerHTML = "";
  const screen = el("div", "stage-screen");
  root.appendChild(screen);

  const progress = el("div", "progress",
    `Stage ${view.stage.number} of ${view.stage.total}`);
  screen.appendChild(progress);
  screen.appendChild(el("h2", "stage-title", stageTitle(view.stage)));
  const requirement = el("div", "requirement", requirementText(view));
  screen.appendChild(requirement);

  const list = el("ul", "candidates");
  screen.appendChild(list);

  const errorBox = el("div", "error");
  errorBox.hidden = true;
  screen.appendChild(errorBox);

  const submit = el("button", "submit", "Submit stage") as HTMLButtonElement;
  submit.disabled = true;
  screen.appendChild(submit);

  function sync(): void {
    requirement.textContent = requirementText(view);
    submit.disabled = inFlight || !canSubmit(view);
    for (const li of Array.from(list.children) as HTMLLIElement[]) {
      const index = Number(li.dataset.index);
      li.classList.toggle("selected", view.selected.has(index));
      li.classList.toggle("defective", view.defective.has(index));
      const checkbox = li.querySelector("input") as HTMLInputElement;
      checkbox.checked = view.selected.has(index);
      checkbox.disabled = view.defective.has(index);
    }
  }

  for (const candidate of view.candidates) {
    const li = el("li", "candidate");
    li.dataset.index = String(candidate.index);

    const label = el("label");
    const checkbox = el("input") as HTMLInputElement;
    checkbox.type = "checkbox";
    checkbox.addEventListener("change", () => {
      toggleSelected(view, candidate.index);
      sync();
    });
    label.appendChild(checkbox);
    label.appendChild(el("span", "text", candidate.text));
    li.appendChild(label);

    if (view.allowDefective) {
      const defectiveButton = el("button", "mark-defective", "defective");
      defectiveButton.type = "button";
      defectiveButton.addEventListener("click", () => {
        toggleDefective(view, candidate.index);
        sync();
      });
      li.appendChild(defectiveButton);
    }
    list.appendChild(li);
  }

  submit.addEventListener("click", async () => {
    if (inFlight) return;
    inFlight = true;
    sync();
    try {
      const response = await client.submit(
        view.sessionId,
        view.judgeId,
        [...view.selected],
        [...view.defective],
        token,
      );
      if (response.status === "completed") {
        callbacks.onCompleted(response.session);
      } else {
        callbacks.onAdvanced(response.session);
      }
    } catch (error) {
      inFlight = false;
      if (error instanceof ServiceError) {
        if (error.payload.error === "UnknownSession") {
          callbacks.onSessionExpired();
          return;
        }
        // surface the server's rule verbatim
        errorBox.textContent = `${error.payload.error}: ${error.message}`;
      } else {
        errorBox.textContent = "network failure; please retry";
      }
      errorBox.hidden = false;
      sync();
    }
  });

  sync();
  return view;
}

const RECAP_LEVELS = ["paragraph", "section", "document", "short"] as const;

export function renderCompletion(
  root: HTMLElement,
  session: SessionView,
  onNextTask: () => void,
): void {
  root.innerHTML = "";
  const screen = el("div", "completion-screen");
  root.appendChild(screen);
  screen.appendChild(el("h2", undefined, "Annotation complete"));

  const annotation = session.annotation;
  if (annotation) {
    const recap = el("dl", "recap");
    const union = (sets: Record<string, number[]>) =>
      [...new Set(Object.values(sets).flat())].sort((a, b) => a - b);
    const levels: Record<(typeof RECAP_LEVELS)[number], number[]> = {
      paragraph: union(annotation.paragraph),
      section: union(annotation.section),
      document: [...annotation.document],
      short: [...annotation.short],
    };
    for (const level of RECAP_LEVELS) {
      recap.appendChild(el("dt", undefined, level));
      const dd = el("dd", `recap-${level}`, levels[level].join(", "));
      dd.dataset.indices = JSON.stringify(levels[level]);
      recap.appendChild(dd);
    }
    screen.appendChild(recap);
  }

  const next = el("button", "next-task", "Next task");
  next.addEventListener("click", onNextTask);
  screen.appendChild(next);
}

export function renderNoWork(root: HTMLElement, onRetry: () => void): void {
  root.innerHTML = "";
  const screen = el("div", "no-work");
  screen.appendChild(el("p", undefined, "No open task right now."));
  const retry = el("button", "retry", "Check again");
  retry.addEventListener("click", onRetry);
  screen.appendChild(retry);
  root.appendChild(screen);
}
