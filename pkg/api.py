from typing import List, Optional
from fastapi import FastAPI, HTTPException, Request, status, Security, Depends
from fastapi.responses import JSONResponse
from fastapi.security import APIKeyHeader
from pydantic import BaseModel, Field
import logging
import os

from config import VERSION, configure_logging, get_settings
from scalar_means import PositivePair
from search import search_grid
from tables import eval_record
from utils import parse_t_grid
from verify import (CHECKS, LOWER_ORDERS, PROPS41_COEFFICIENTS, UPPER_ORDERS, UPPER_VARIANTS, X_KINDS,
                    InstanceSpec, SuiteOptions, UnknownCheckError, run_suite)

logger = logging.getLogger(__name__)

app = FastAPI(title="logmean-bounds", version=VERSION)

MAX_API_TRIALS = 1000
MAX_API_M_MAX = 10 ** 6
MAX_API_ORDER = 64

# API Key authentication (optional, for production deployment)
API_KEY_NAME = "X-API-Key"
api_key_header = APIKeyHeader(name=API_KEY_NAME, auto_error=False)


def get_api_key(api_key: str = Security(api_key_header)) -> str:
    """
    Validate API key if API_KEY environment variable is set.

    If API_KEY is not set, authentication is disabled (for local development).
    """
    required_api_key = os.getenv("API_KEY")

    if not required_api_key:
        logger.debug("API authentication disabled - no API_KEY configured")
        return None

    if not api_key or api_key != required_api_key:
        logger.warning("Invalid or missing API key")
        raise HTTPException(
            status_code=status.HTTP_401_UNAUTHORIZED,
            detail="Invalid or missing API key"
        )

    return api_key


@app.on_event("startup")
async def startup_event():
    """Validate settings and configure logging on application startup."""
    try:
        settings = get_settings()
        configure_logging(settings.log_level)
        logger.info("API startup complete")
    except ValueError as e:
        logger.error(f"Invalid configuration: {e}")
        raise


@app.exception_handler(UnknownCheckError)
async def unknown_check_handler(request: Request, exc: UnknownCheckError):
    return JSONResponse(status_code=422, content={"detail": exc.args[0] if exc.args else "unknown check"})


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


# Generic error handler to prevent information leakage
@app.exception_handler(Exception)
async def generic_exception_handler(request: Request, exc: Exception):
    """Handle all unhandled exceptions with generic error response."""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={"detail": "An internal error occurred"}
    )


class EvalQuery(BaseModel):
    a: Optional[float] = None
    b: Optional[float] = None
    t: Optional[float] = None
    m: int = Field(1, ge=1)


class EvalResult(BaseModel):
    a: float
    b: float
    m: int
    log_mean: float
    geo_mean: float
    arith_mean: float
    lin_upper: float
    polya_upper: float
    rational_lower: float
    alpha_m: float
    beta_m: float
    gamma_m: float
    delta_m: float


class CheckInfo(BaseModel):
    check_id: str
    family: str
    statement: str
    statement_hash: str


class VerifyQuery(BaseModel):
    seed: Optional[int] = None
    trials: int = Field(100, ge=1, le=MAX_API_TRIALS)
    dim: Optional[int] = None
    checks: Optional[List[str]] = None
    lower_orders: List[int] = Field(default_factory=lambda: list(LOWER_ORDERS), min_length=1)
    upper_orders: List[int] = Field(default_factory=lambda: list(UPPER_ORDERS), min_length=1)
    x_kind: str = "gaussian_complex"
    upper_variant: str = "ax_plus_xb"
    props41_variant: str = "polya"


class LinkRow(BaseModel):
    check_id: str
    link: str
    evaluations: int
    failures: int
    skipped: int
    worst_margin: Optional[float] = None
    worst_ratio: Optional[float] = None


class VerifyResult(BaseModel):
    passed: bool
    failures: int
    meta: dict
    rows: List[LinkRow]


class MinOrderQuery(BaseModel):
    t_grid: str = "1e-3:1e3:21:log"
    m_max: int = Field(10 ** 6, ge=2, le=MAX_API_M_MAX)


class MinOrderRow(BaseModel):
    t: float
    min_m: Optional[int] = None
    beta_at_min: Optional[float] = None
    lin_upper: float
    log_mean: float


class MinOrderResult(BaseModel):
    summary: dict
    rows: List[MinOrderRow]


@app.post("/eval", response_model=EvalResult)
async def evaluate(query: EvalQuery, api_key: str = Depends(get_api_key)):
    if query.t is not None and query.a is None and query.b is None:
        pair = PositivePair(query.t, 1.0)
    elif query.t is None and query.a is not None and query.b is not None:
        pair = PositivePair(query.a, query.b)
    else:
        raise HTTPException(status_code=422, detail="Give either t or both a and b")
    return EvalResult(**eval_record(pair, query.m))


@app.get("/checks", response_model=List[CheckInfo])
async def list_checks(api_key: str = Depends(get_api_key)):
    return [CheckInfo(check_id=d.check_id, family=d.family, statement=d.statement,
                      statement_hash=d.statement_hash) for d in CHECKS.values()]


@app.post("/verify", response_model=VerifyResult)
def verify(query: VerifyQuery, api_key: str = Depends(get_api_key)):
    if query.x_kind not in X_KINDS:
        raise HTTPException(status_code=422, detail="Invalid x_kind")
    if query.upper_variant not in UPPER_VARIANTS:
        raise HTTPException(status_code=422, detail="Invalid upper_variant")
    if query.props41_variant not in PROPS41_COEFFICIENTS:
        raise HTTPException(status_code=422, detail="Invalid props41_variant")
    if max(query.lower_orders + query.upper_orders) > MAX_API_ORDER:
        raise HTTPException(status_code=422, detail=f"Orders must not exceed {MAX_API_ORDER}")
    settings = get_settings()
    spec = InstanceSpec(seed=query.seed if query.seed is not None else settings.seed,
                        dim=query.dim, x_kind=query.x_kind)
    options = SuiteOptions(tolerances=settings.tolerances, lower_orders=tuple(query.lower_orders),
                           upper_orders=tuple(query.upper_orders), upper_variant=query.upper_variant,
                           props41_variant=query.props41_variant, workers=settings.workers)
    report = run_suite(spec, query.trials, query.checks, options)
    return VerifyResult(passed=report.passed, failures=report.failures, meta=report.full_meta(),
                        rows=[LinkRow(**row) for row in report.rows()])


@app.post("/min-m", response_model=MinOrderResult)
def min_order(query: MinOrderQuery, api_key: str = Depends(get_api_key)):
    rows, summary = search_grid(parse_t_grid(query.t_grid), query.m_max)
    return MinOrderResult(summary=summary, rows=[MinOrderRow(**row) for row in rows])
