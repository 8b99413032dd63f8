// Browser bootstrap: judge sign-in, task loop, stage wizard.

import { ApiClient } from "./api.js";
import { renderCompletion, renderNoWork, renderStageScreen } from "./wizard.js";
import type { SessionView } from "./types.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8400";
}

export function startApp(root: HTMLElement): void {
  const client = new ApiClient(apiBase());

  function showSignIn(): void {
    root.innerHTML = "";
    const form = document.createElement("form");
    form.className = "sign-in";
    const input = document.createElement("input");
    input.placeholder = "judge id";
    input.required = true;
    const button = document.createElement("button");
    button.textContent = "Start annotating";
    form.appendChild(input);
    form.appendChild(button);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const judgeId = input.value.trim();
      if (!judgeId) return;
      await client.registerJudge(judgeId);
      await taskLoop(judgeId);
    });
    root.appendChild(form);
  }

  async function taskLoop(judgeId: string): Promise<void> {
    const assigned = await client.nextTask(judgeId);
    if (assigned === null) {
      renderNoWork(root, () => void taskLoop(judgeId));
      return;
    }
    runSession(judgeId, assigned.session);
  }

  function runSession(judgeId: string, session: SessionView): void {
    if (session.completed) {
      renderCompletion(root, session, () => void taskLoop(judgeId));
      return;
    }
    renderStageScreen(root, client, session, {
      onAdvanced: (next) => runSession(judgeId, next),
      onCompleted: (next) => renderCompletion(root, next, () => void taskLoop(judgeId)),
      onSessionExpired: () => void taskLoop(judgeId),
    });
  }

  showSignIn();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  startApp(document.getElementById("app") as HTMLElement);
}
