"""
FastAPI application exposing batch e-values and small synchronous experiments
"""
import os
import sys
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional, Tuple

import uvicorn

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer
from pydantic import BaseModel, ConfigDict, Field

from config.settings import settings
from app.ec2st.evalues import batch_log_evalue, bounded_log_evalue, lambda_objective, optimize_lambda
from app.eprocess.algebra import ev_to_pvalue
from app.harness.schema import EXPERIMENT_KINDS
from app.harness.service import run_experiment
from app.models.evidence import LogEValue
from app.utils.config_loader import parse_experiment_config
from app.utils.exceptions import UsageError
from app.utils.logger import get_logger

logger = get_logger()

# Create FastAPI app
app = FastAPI(
    title=f"{settings.app_name} API",
    description="Anytime-valid e-values for classifier two-sample testing",
    version=settings.app_version,
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Security
security = HTTPBearer(auto_error=False)


def verify_api_token(credentials: Optional[HTTPAuthorizationCredentials] = Depends(security)):
    """Check the bearer token when one is configured"""
    if settings.api_token is None:
        return None
    if credentials is None or credentials.credentials != settings.api_token:
        raise HTTPException(status_code=401, detail="Invalid API token")
    return credentials.credentials


class BatchEValueRequest(BaseModel):
    """Classifier probabilities for one batch with its labels"""
    model_config = ConfigDict(populate_by_name=True)

    probs: List[float]
    labels: List[int]
    lam: float = Field(default=settings.initial_lambda, alias="lambda")


class LambdaRequest(BaseModel):
    probs: List[float]
    labels: List[int]
    method: Literal["bisection", "lbfgsb"] = "bisection"
    bounds: Tuple[float, float] = (settings.lambda_min, settings.lambda_max)


# Health check endpoint
@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "version": settings.app_version,
    }


# Configuration endpoint
@app.get("/config")
async def get_config():
    """Get the testing defaults"""
    return {
        "alpha": settings.alpha,
        "batch_size": settings.batch_size,
        "initial_lambda": settings.initial_lambda,
        "lambda_bounds": [settings.lambda_min, settings.lambda_max],
        "n_permutations": settings.n_permutations,
        "replications": settings.replications,
        "experiments": list(EXPERIMENT_KINDS),
    }


@app.post("/evalues/batch")
async def batch_evalue(request: BatchEValueRequest, token: Optional[str] = Depends(verify_api_token)):
    """Raw and lambda-bounded log e-values of one batch"""
    log_e, points = batch_log_evalue(request.probs, request.labels)
    return {
        "n": len(points),
        "log_e": log_e,
        "bounded_log_e": bounded_log_evalue(points, request.lam),
        "lambda": request.lam,
        "p_value": ev_to_pvalue(LogEValue(log_e=log_e)),
    }


@app.post("/evalues/lambda")
async def fit_lambda(request: LambdaRequest, token: Optional[str] = Depends(verify_api_token)):
    """Mixture weight maximizing the batch's bounded log e-value"""
    _, points = batch_log_evalue(request.probs, request.labels)
    lam = optimize_lambda(points, request.bounds, request.method)
    return {"lambda": lam, "objective": lambda_objective(points, lam), "method": request.method}


@app.post("/experiments/{kind}")
async def run_experiment_endpoint(kind: str, overrides: Dict[str, Any],
                                  token: Optional[str] = Depends(verify_api_token)):
    """Run a (small) experiment synchronously and return its curves and summary"""
    if kind not in EXPERIMENT_KINDS:
        raise HTTPException(status_code=404, detail=f"Unknown experiment kind: {kind}")
    config = parse_experiment_config({**overrides, "kind": kind})
    logger.info(f"Running {kind} experiment with {config.replications} replications over HTTP")
    result = await run_in_threadpool(run_experiment, config)
    return {
        "kind": kind,
        "curves": [curve.model_dump() for curve in result.curves],
        "summary": result.summary,
    }


# Error handlers
@app.exception_handler(UsageError)
async def usage_error_handler(request: Request, exc: UsageError):
    return JSONResponse(
        status_code=400,
        content={"error": type(exc).__name__, "detail": str(exc)}
    )


@app.exception_handler(Exception)
async def internal_error_handler(request: Request, exc: Exception):
    logger.error(f"Internal server error: {exc}")
    return JSONResponse(
        status_code=500,
        content={"error": "Internal server error", "detail": "Please try again later"}
    )


if __name__ == "__main__":
    # Run the application
    uvicorn.run(
        "app.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.reload,
        log_level=settings.log_level.lower()
    )
