# routes/deps.py
from fastapi import HTTPException, Request

from store.reports import ReportStore


def get_reports(request: Request) -> ReportStore:
    reports = getattr(request.app.state, "reports", None)
    if reports is None:
        raise HTTPException(status_code=503, detail="Report store unavailable")
    return reports
