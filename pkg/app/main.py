from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
import logging
from datetime import datetime

from pydantic import ValidationError

from app.config import get_settings
from app.errors import IntegrationError, NotPoissonError, PolyError, StructureError, UnknownSystemError
from app.hamiltonian.systems import REGISTRY, describe, get_system, list_systems
from app.models import DeriveRequest, DerivedSystemResponse, IntegratorConfig, SimulateRequest, VerifyResponse
from app.services.derivation import derive
from app.services.simulation import conservation_report, simulate_system, trajectory_payload
from app.services.verification import run_all, run_checks

# Configure logging
logging.basicConfig(level=get_settings().log_level.upper())
logger = logging.getLogger(__name__)

app = FastAPI(title="Resistive-Hamiltonian Toolkit API", version="1.0.0")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000", "http://127.0.0.1:3000"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _lookup(name: str):
    try:
        return get_system(name)
    except UnknownSystemError as e:
        raise HTTPException(status_code=404, detail=str(e))


@app.get("/")
async def root():
    """Root endpoint with service status"""
    return {
        "message": "Resistive-Hamiltonian Toolkit API",
        "version": "1.0.0",
        "status": "running",
        "systems": len(REGISTRY),
    }


@app.get("/health")
async def health_check():
    return {"status": "healthy", "timestamp": datetime.now().isoformat()}


@app.get("/systems")
async def systems():
    """Registered systems with their parameter defaults"""
    return {
        "systems": [
            {"name": name, "title": REGISTRY[name].title, "parameters": {k: str(v) for k, v in REGISTRY[name].defaults.items()}}
            for name in list_systems()
        ]
    }


@app.get("/systems/{name}")
async def system_detail(name: str):
    sys = _lookup(name)
    return {"name": sys.name, "title": sys.title, "description": describe(sys)}


@app.get("/verify/{name}")
async def verify(name: str, symbolic: bool = Query(False, description="Skip numeric sampling checks")):
    """Run the check catalogue for one system, or every system with name=all"""
    if name == "all":
        reports = run_all(symbolic=symbolic)
        return {
            "passed": all(report.passed for report in reports),
            "reports": [
                VerifyResponse(system=report.system, passed=report.passed, checks=report.checks) for report in reports
            ],
        }
    _lookup(name)
    report = run_checks(name, symbolic=symbolic)
    return VerifyResponse(system=report.system, passed=report.passed, checks=report.checks)


@app.post("/derive", response_model=DerivedSystemResponse)
async def derive_system(request: DeriveRequest):
    """Bi-Hamiltonian, Jordan-rotated or conformal form of a registry system"""
    _lookup(request.system)
    try:
        return derive(request)
    except (PolyError, StructureError, NotPoissonError) as e:
        logger.error(f"Derivation error: {e}")
        return JSONResponse(status_code=422, content={"success": False, "error": str(e)})


@app.post("/simulate")
async def simulate(request: SimulateRequest):
    """Integrate a registry system and return the sampled trajectory"""
    sys = _lookup(request.system)
    settings = get_settings()
    try:
        cfg = IntegratorConfig(
            method=request.method or settings.method,
            step=request.dt or settings.step,
            t_start=request.t0,
            t_end=request.t1,
        )
        traj = simulate_system(sys.name, request.x0, cfg, params=request.params)
    except (ValidationError, IntegrationError, PolyError) as e:
        logger.error(f"Simulation error: {e}")
        return JSONResponse(status_code=422, content={"success": False, "error": str(e)})

    payload = trajectory_payload(traj)
    payload["diverged"] = traj.diverged
    payload["drift"] = {name: conservation_report(traj, name) for name in traj.channels if name in ("H", "G", "Gbar")}
    return payload


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8000)
