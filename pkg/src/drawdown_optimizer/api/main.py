"""FastAPI application for point evaluation and simulation."""

from contextlib import asynccontextmanager
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded

from ..config import Settings, get_settings
from ..logging_config import configure_logging, get_logger
from ..problem_files import list_problems
from .middleware.rate_limit import limiter
from .models import ErrorResponse
from .routes import evaluate_router, health_router, problems_router, simulate_router

logger = get_logger(__name__)

DESCRIPTION = """
Minimum probability of drawdown and the optimal investment strategy under a
wealth-dependent payout rate.

* `GET /problems` lists the packaged problems
* `POST /evaluate` returns phi, the optimal amount, g and k at (w, m)
* `POST /simulate` runs a seeded Monte Carlo estimate
"""


def _error_body(status: int, error: str, message: str, detail: Optional[str]) -> JSONResponse:
    body = ErrorResponse(error=error, message=message, detail=detail)
    return JSONResponse(status_code=status, content=body.model_dump())


def create_app(settings: Optional[Settings] = None) -> FastAPI:
    """Build the application from settings (default: environment)."""
    settings = settings or get_settings()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        configure_logging()
        logger.info(
            "%s v%s: %d problems, rate limiting %s",
            settings.app_name,
            settings.version,
            len(list_problems()),
            "on" if settings.rate_limit_enabled else "off",
        )
        yield

    app = FastAPI(
        title=settings.app_name,
        version=settings.version,
        description=DESCRIPTION,
        lifespan=lifespan,
        docs_url=f"{settings.api_prefix}/docs",
        redoc_url=f"{settings.api_prefix}/redoc",
        openapi_url=f"{settings.api_prefix}/openapi.json",
    )

    if settings.rate_limit_enabled:
        app.state.limiter = limiter
        app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

    app.add_middleware(
        CORSMiddleware,
        allow_origins=settings.cors_origins,
        allow_credentials=settings.cors_credentials,
        allow_methods=settings.cors_methods,
        allow_headers=settings.cors_headers,
    )

    @app.exception_handler(404)
    async def not_found(request: Request, exc: Exception) -> JSONResponse:
        message = str(getattr(exc, "detail", exc))
        return _error_body(404, "Not Found", message, "The requested resource was not found")

    @app.exception_handler(500)
    async def internal_error(request: Request, exc: Exception) -> JSONResponse:
        detail = str(getattr(exc, "detail", exc)) if settings.debug else None
        return _error_body(500, "Internal Server Error", "An unexpected error occurred", detail)

    @app.get("/")
    async def root() -> dict[str, Any]:
        prefix = settings.api_prefix
        return {
            "name": settings.app_name,
            "version": settings.version,
            "docs": f"{prefix}/docs",
            "problems": f"{prefix}/problems",
        }

    for router in (health_router, problems_router, evaluate_router, simulate_router):
        app.include_router(router, prefix=settings.api_prefix)
    return app


app = create_app()
