"""HTTP surface over :class:`~sumstage.service.AnnotationService`.

Error payloads carry the raising error's class name so clients can surface the
exact rule that was violated, e.g.::

    {"error": "BelowMinimum", "message": "...", "stage": "...", "required": 3, "got": 2}
"""

from __future__ import annotations

from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import errors
from .service import AnnotationService

_STATUS = {
    errors.SchemaViolation: 400,
    errors.InvariantViolation: 400,
    errors.BelowMinimum: 400,
    errors.NotACandidate: 400,
    errors.DefectiveOutsideParagraphStage: 400,
    errors.EmptyDocument: 400,
    errors.EmptyCorpus: 409,
    errors.DegenerateData: 409,
    errors.SessionCompleted: 409,
    errors.DuplicateDocument: 409,
    errors.OwnershipViolation: 403,
    errors.UnknownJudge: 404,
    errors.UnknownSession: 404,
    errors.UnknownDocument: 404,
    errors.TooFewJudges: 409,
}


def _error_payload(exc: errors.SumstageError) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("field", "invariant", "required", "got", "sentence_index"):
        if hasattr(exc, attr):
            payload[attr] = getattr(exc, attr)
    if hasattr(exc, "stage") and exc.stage is not None:
        payload["stage"] = str(exc.stage)
    return payload


def create_app(service: AnnotationService) -> FastAPI:
    app = FastAPI(title="sumstage annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(errors.SumstageError)
    async def _handle(request: Request, exc: errors.SumstageError):
        status = 500
        for klass, code in _STATUS.items():
            if isinstance(exc, klass):
                status = code
                break
        return JSONResponse(status_code=status, content=_error_payload(exc))

    @app.post("/documents")
    def ingest_document(payload: dict = Body(...)):
        doc_id = service.add_document(payload)
        return {"doc_id": doc_id}

    @app.post("/judges")
    def register_judge(payload: dict = Body(...)):
        judge_id = str(payload.get("judge_id", "")).strip()
        if not judge_id:
            raise errors.SchemaViolation("judge_id", "judge_id must be a non-empty string")
        service.register_judge(judge_id)
        return {"judge_id": judge_id}

    @app.get("/tasks/next")
    def next_task(judge: str = Query(...)):
        assigned = service.next_task(judge)
        if assigned is None:
            return JSONResponse(status_code=404, content={
                "error": "NoWork", "message": "no open task left for this judge"})
        doc_id, session = assigned
        return {
            "doc_id": doc_id,
            "session_id": session.session_id,
            "session": service.session_view(session.session_id),
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.session_view(session_id)

    @app.post("/sessions/{session_id}/submit")
    def submit(session_id: str, payload: dict = Body(...)):
        judge = str(payload.get("judge", ""))
        selected = payload.get("selected", [])
        defective = payload.get("defective", [])
        token = payload.get("token")
        if not isinstance(selected, list) or not isinstance(defective, list):
            raise errors.SchemaViolation("selected", "selected/defective must be integer lists")
        return service.submit(session_id, judge, selected, defective,
                              token=str(token) if token is not None else None)

    @app.post("/sessions/{session_id}/abandon")
    def abandon(session_id: str, payload: dict = Body(default={})):
        judge = str(payload.get("judge", ""))
        service.abandon(session_id, judge)
        return {"status": "abandoned"}

    @app.get("/documents/{doc_id}/annotations")
    def annotations(doc_id: str):
        from .session import annotation_to_json
        return {
            "doc_id": doc_id,
            "annotations": [annotation_to_json(a) for a in service.annotations_for(doc_id)],
        }

    @app.get("/export")
    def export(partition: str | None = Query(default=None),
               include_incomplete: bool = Query(default=False)):
        return service.export_dataset(partition, include_incomplete)

    @app.get("/reports/agreement")
    def report_agreement(partition: str | None = Query(default=None),
                         panel_a: str | None = Query(default=None),
                         panel_b: str | None = Query(default=None)):
        split = lambda s: set(s.split(",")) if s else None
        return service.agreement_view(partition, split(panel_a), split(panel_b))

    @app.get("/reports/distribution")
    def report_distribution(partition: str | None = Query(default=None),
                            bins: int = Query(default=10, ge=1)):
        return service.distribution_report(partition, n_bins=bins)

    @app.get("/reports/eval")
    def report_eval(partition: str | None = Query(default=None)):
        return service.eval_view(partition)

    return app
