"""
FastAPI Web Interface for the spectral Boltzmann solver

Exposes the truncation advisor, the relative-error estimate and the
weighting-function probe over HTTP. Collision-operator runs and time
evolutions stay on the command line.
"""

import logging
from typing import Any, Dict, List, Literal, Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .advisor import MaxwellBound, advise, e_rel, e_rel_asymptotic
from .ckernel import MAXWELL_BTILDE, CollisionParams, kernel_probe
from .errors import SpectralBoltzmannError
from .scenarios import SCENARIOS, build_scenario, materialize
from .vgrid import MIN_NODES, VelocityGrid

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

# Create FastAPI app
app = FastAPI(
    title="Spectral Boltzmann API",
    description="Truncation advisor and weighting-function probes for the spectral Boltzmann solver",
    version=__version__
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Pydantic models for API requests and responses
class AdviseRequest(BaseModel):
    scenario: str = "bkw"
    params: Dict[str, Any] = Field(default_factory=dict)
    method: Literal["I", "II"] = "I"
    tol: float = Field(0.1, gt=0)
    v_target: float = Field(4.0, gt=0)
    L: float = Field(10.0, gt=0)
    N: int = Field(32, ge=MIN_NODES, le=64)
    lam: float = Field(0.0, ge=0.0, le=1.0)
    btilde: float = Field(MAXWELL_BTILDE, gt=0)


class SweepPoint(BaseModel):
    v: float
    e_rel: float


class AdviseResponse(BaseModel):
    method: str
    k: float
    c: float
    g_tr: float
    tol: float
    v_target: float
    sweep: List[SweepPoint] = []


class ERelRequest(BaseModel):
    g_tr: float = Field(gt=0)
    v: float = Field(ge=0)
    c: float = Field(gt=0)
    k: float = Field(gt=0)
    lam: float = Field(0.0, ge=0.0, le=1.0)
    btilde: float = Field(MAXWELL_BTILDE, gt=0)


class ERelResponse(BaseModel):
    e_rel: float
    asymptotic: Optional[float] = None


class KernelProbeRequest(BaseModel):
    zeta: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    direction: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    xi_max: float = Field(10.0, gt=0)
    points: int = Field(201, ge=2, le=100000)
    g_tr: float = Field(8.0, gt=0)
    btilde: float = Field(MAXWELL_BTILDE, gt=0)


class KernelProbeResponse(BaseModel):
    abs_xi: List[float]
    values: List[float]


@app.exception_handler(SpectralBoltzmannError)
async def solver_error_handler(request: Request, exc: SpectralBoltzmannError):
    logger.warning(f"{request.url.path}: {exc}")
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/")
async def root():
    """Root endpoint with API information."""
    return {
        "message": "Spectral Boltzmann API",
        "version": __version__,
        "endpoints": {
            "/advise": "POST - Fit a Maxwellian envelope to a scenario and recommend g_tr",
            "/e-rel": "POST - Relative truncation error bound for a given envelope",
            "/kernel-probe": "POST - Weighting function along a ray in xi",
            "/scenarios": "GET - Available scenarios",
            "/health": "GET - Health check",
            "/docs": "GET - API documentation"
        }
    }


@app.get("/scenarios")
async def scenarios():
    return {"scenarios": sorted(SCENARIOS)}


@app.post("/advise", response_model=AdviseResponse)
def advise_endpoint(request: AdviseRequest):
    """Sample the scenario on an (L, N) grid, fit the envelope and recommend g_tr."""
    scenario = build_scenario(request.scenario, request.params)
    field = materialize(scenario, VelocityGrid(L=request.L, N=request.N))
    recommendation = advise(field, request.method, request.tol, request.v_target,
                            lam=request.lam, btilde=request.btilde)
    logger.info(f"Advised g_tr={recommendation.g_tr:.3f} for {request.scenario} (method {request.method})")
    return AdviseResponse(**recommendation.to_dict())


@app.post("/e-rel", response_model=ERelResponse)
def e_rel_endpoint(request: ERelRequest):
    bound = MaxwellBound(c=request.c, k=request.k)
    value = e_rel(request.g_tr, request.v, bound, request.lam, request.btilde)
    asymptotic = None
    if request.lam == 0.0 and request.btilde == MAXWELL_BTILDE and request.v > 0:
        asymptotic = e_rel_asymptotic(request.g_tr, request.v, bound)
    return ERelResponse(e_rel=value, asymptotic=asymptotic)


@app.post("/kernel-probe", response_model=KernelProbeResponse)
def kernel_probe_endpoint(request: KernelProbeRequest):
    params = CollisionParams(g_tr=request.g_tr, btilde=request.btilde)
    s, values = kernel_probe(request.zeta, request.direction, request.xi_max, request.points, params)
    return KernelProbeResponse(abs_xi=s.tolist(), values=values.tolist())


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "service": "spectral-boltzmann"}
