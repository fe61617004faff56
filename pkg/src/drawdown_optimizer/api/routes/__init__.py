"""API routes package."""

from .evaluate import router as evaluate_router
from .health import router as health_router
from .problems import router as problems_router
from .simulate import router as simulate_router

__all__ = ["evaluate_router", "health_router", "problems_router", "simulate_router"]
