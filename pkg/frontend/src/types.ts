// Payload shapes of the annotation service API.

export type StageKind = "paragraph" | "section" | "document" | "short";

export interface StageInfo {
  kind: StageKind;
  section: number | null;
  paragraph: number | null;
  number: number;
  total: number;
}

export interface Candidate {
  index: number;
  text: string;
}

export interface Requirement {
  min: number;
  exact: number | null;
}

export interface AnnotationJson {
  doc_id: string;
  judge_id: string;
  defective: number[];
  paragraph: Record<string, number[]>;
  section: Record<string, number[]>;
  document: number[];
  short: number[];
  completed_at: string;
}

export interface SessionView {
  session_id: string;
  doc_id: string;
  judge_id: string;
  completed: boolean;
  defective: number[];
  selections: {
    paragraph: Record<string, number[]>;
    section: Record<string, number[]>;
    document: number[];
    short: number[];
  };
  stage: StageInfo | null;
  candidates: Candidate[];
  requirement: Requirement | null;
  annotation?: AnnotationJson | null;
}

export interface NextTaskResponse {
  doc_id: string;
  session_id: string;
  session: SessionView;
}

export interface SubmitResponse {
  status: "advanced" | "completed";
  session: SessionView;
}

export interface ApiError {
  error: string;
  message: string;
  stage?: string;
  required?: number;
  got?: number;
  sentence_index?: number;
  field?: string;
}
