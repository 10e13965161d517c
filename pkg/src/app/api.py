import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request, status
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from .core.config import get_settings
from .core.errors import DLMError
from .core.utils import configure_logging
from .models import CheckResult, RunRequest, RunResponse
from .services.run_service import default_output_dir, run_scenario

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    configure_logging(get_settings().log_level)
    logger.info("Solver API ready")

    yield

    logger.info("Solver API shutting down")


app = FastAPI(
    title="DLM Galerkin Solver",
    description=(
        "Runs fictitious-domain fluid-structure scenarios through the spectral "
        "Galerkin pipeline and returns the verification report."
    ),
    version="0.1.0",
    lifespan=lifespan,
)


@app.get("/health")
async def health_check():
    return {"status": "ok"}


@app.exception_handler(DLMError)
async def solver_exception_handler(request: Request, exc: DLMError) -> JSONResponse:
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": str(exc), "error": type(exc).__name__},
    )


@app.exception_handler(ValidationError)
async def validation_exception_handler(request: Request, exc: ValidationError) -> JSONResponse:
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content={"detail": exc.errors(include_url=False, include_context=False)},
    )


@app.exception_handler(Exception)
async def unhandled_exception_handler(
        request: Request, exc: Exception
) -> JSONResponse:  # pragma: no cover - simple catch-all
    """Catch-all handler for unexpected errors.

    FastAPI still handles `HTTPException` instances and request validation
    errors separately; this is only for truly unexpected failures so API
    consumers get a consistent 500 response body.
    """

    if isinstance(exc, HTTPException):
        raise exc

    logger.exception("Unhandled error on %s", request.url.path)
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": "Internal server error"},
    )


@app.post("/runs", response_model=RunResponse)
def create_run(payload: RunRequest) -> RunResponse:
    """Run a scenario synchronously and return its verification report.

    With ``write_outputs`` the artifacts are written to the scenario's output
    directory (or ``runs/<name>-<hash>``) exactly as the CLI writes them.
    """
    scenario = payload.scenario
    directory = default_output_dir(scenario) if payload.write_outputs else None
    state = run_scenario(scenario, output_dir=directory, write=payload.write_outputs)
    report = state["report"]
    trajectory = state["trajectory"]

    return RunResponse(
        scenario=scenario.name,
        scenario_hash=scenario.hash,
        passed=report.passed,
        checks=[CheckResult(**check.model_dump()) for check in report.checks],
        final_time=trajectory.final.t,
        frames=len(trajectory.frames),
        output_dir=str(directory) if directory is not None else None,
    )
