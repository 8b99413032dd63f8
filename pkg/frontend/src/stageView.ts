// View-model of one stage screen plus the client-side validation rules.
//
// The rendered candidate rows are exactly the service's candidate list, in the
// service's order: this module never adds, drops or reorders sentences.  The
// validation here mirrors a subset of the server's rules so the submit control
// can be disabled early; the server remains authoritative.

import type { Candidate, Requirement, SessionView, StageInfo } from "./types.js";

export interface StageView {
  sessionId: string;
  docId: string;
  judgeId: string;
  stage: StageInfo;
  candidates: Candidate[];
  requirement: Requirement;
  selected: Set<number>;
  defective: Set<number>; // marks made on this screen (paragraph stages only)
  allowDefective: boolean;
}

export function buildStageView(session: SessionView): StageView {
  if (session.completed || session.stage === null || session.requirement === null) {
    throw new Error("session has no active stage");
  }
  return {
    sessionId: session.session_id,
    docId: session.doc_id,
    judgeId: session.judge_id,
    stage: session.stage,
    candidates: session.candidates,
    requirement: session.requirement,
    selected: new Set<number>(),
    defective: new Set<number>(),
    allowDefective: session.stage.kind === "paragraph",
  };
}

export function stageTitle(stage: StageInfo): string {
  switch (stage.kind) {
    case "paragraph":
      return `Paragraph ${stage.paragraph! + 1} (section ${stage.section! + 1})`;
    case "section":
      return `Section ${stage.section! + 1} summary`;
    case "document":
      return "Document summary";
    case "short":
      return "Short summary";
  }
}

/** Number of sentences still required, after defective marks are discounted. */
export function effectiveMinimum(view: StageView): number {
  const selectable = view.candidates.length - view.defective.size;
  return Math.min(view.requirement.min, selectable);
}

export function requirementText(view: StageView): string {
  if (view.requirement.exact !== null) {
    return `select exactly ${view.requirement.exact}`;
  }
  return `select at least ${effectiveMinimum(view)}`;
}

export function canSubmit(view: StageView): boolean {
  const count = view.selected.size;
  if (view.requirement.exact !== null) {
    return count === view.requirement.exact;
  }
  return count >= effectiveMinimum(view);
}

export function toggleSelected(view: StageView, index: number): void {
  if (view.defective.has(index)) {
    return; // defective sentences are not selectable
  }
  if (!view.candidates.some((c) => c.index === index)) {
    return; // never select outside the offered candidates
  }
  if (view.selected.has(index)) {
    view.selected.delete(index);
  } else {
    view.selected.add(index);
  }
}

export function toggleDefective(view: StageView, index: number): void {
  if (!view.allowDefective) {
    return;
  }
  if (!view.candidates.some((c) => c.index === index)) {
    return;
  }
  if (view.defective.has(index)) {
    view.defective.delete(index);
  } else {
    view.defective.add(index);
    view.selected.delete(index); // a sentence cannot be both
  }
}
