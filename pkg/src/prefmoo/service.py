"""Interactive steering service: optimization in decision-maker-driven cycles.

A session owns one benchmark problem, a reference lattice, and the evolving
population. Each cycle optionally revises the aspiration (which remaps the
base lattice and re-matches the population to the new subproblems), then
runs a requested number of generations warm-started from the previous
population. Cycles execute on a worker thread; clients poll the session
snapshot, which always reflects the last completed state plus a progress
fraction.
"""

from __future__ import annotations

import json
import tempfile
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import PrefmooError, ValidationError
from .lattice import ReferenceSet, generate_das_dennis, project_to_simplex
from .mapping import RoiSpec, map_reference_set
from .optimizer import (
    Individual,
    NeighborhoodParams,
    OperatorParams,
    build_subproblems,
    evolve_generation,
    stable_match,
)
from .problems import ProblemSpec, evaluate_batch, make_problem


class ServiceError(PrefmooError):
    def __init__(self, status: int, code: str, message: str, pointer: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.pointer = pointer


def _cycle_rng(seed: int, cycle: int) -> np.random.Generator:
    # independent, replayable stream per (session seed, cycle index)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, cycle])))


def _check_roi(roi: RoiSpec, m: int, h: int) -> None:
    from .errors import TauBoundError

    try:
        roi.resolve(m, h)
    except TauBoundError as exc:
        raise ServiceError(400, "tau_bounds", str(exc), pointer="/roi/tau") from exc


@dataclass
class CycleRecord:
    cycle: int
    roi: dict
    generations: int
    initial_decisions: list[list[float]]
    decisions: list[list[float]]
    objectives: list[list[float]]
    reference_points: list[list[float]]
    metrics: dict

    def to_json(self) -> dict:
        return self.__dict__.copy()


@dataclass
class Session:
    session_id: str
    problem: ProblemSpec
    h: int
    seed: int
    roi: RoiSpec
    base: ReferenceSet
    refset: ReferenceSet
    population: list[Individual]
    ideal: np.ndarray
    generation: int = 0
    history: list[CycleRecord] = field(default_factory=list)
    status: str = "idle"
    progress: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)
    cancel: threading.Event = field(default_factory=threading.Event)
    worker: threading.Thread | None = None
    cycle_counter: int = 0

    def snapshot(self) -> dict:
        with self.lock:
            F = np.vstack([ind.f for ind in self.population])
            return {
                "session_id": self.session_id,
                "status": self.status,
                "progress": self.progress if self.status == "running" else 1.0,
                "problem": {
                    "name": self.problem.name,
                    "m": self.problem.m,
                    "n": self.problem.n,
                },
                "lattice": {"h": self.h},
                "seed": self.seed,
                "roi": self.roi.to_json(),
                "pivot": project_to_simplex(self.roi.z_r).tolist(),
                "reference_points": self.refset.points.tolist(),
                "objectives": F.tolist(),
                "ideal": self.ideal.tolist(),
                "generation": self.generation,
                "cycles_completed": len(self.history),
                "history": [
                    {
                        "cycle": rec.cycle,
                        "roi": rec.roi,
                        "generations": rec.generations,
                        "metrics": rec.metrics,
                    }
                    for rec in self.history
                ],
            }


class SessionManager:
    """Owns all live sessions; session mutation is serialized per session."""

    def __init__(self, persist_dir: str | None = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._persist_dir = Path(persist_dir) if persist_dir else None
        self.operators = OperatorParams()
        self.neighborhood = NeighborhoodParams()

    def create(self, problem: ProblemSpec, roi: RoiSpec, h: int, seed: int) -> Session:
        base = generate_das_dennis(problem.m, h)
        _check_roi(roi, problem.m, h)  # surfaces bad ROI parameters before any work
        refset = map_reference_set(base, roi)
        rng = _cycle_rng(seed, 0)
        X = rng.random((len(refset), problem.n))
        F = evaluate_batch(problem, X)
        population = [Individual(x=X[i].copy(), f=F[i].copy()) for i in range(len(refset))]
        session = Session(
            session_id=uuid.uuid4().hex,
            problem=problem,
            h=h,
            seed=seed,
            roi=roi,
            base=base,
            refset=refset,
            population=population,
            ideal=F.min(axis=0),
        )
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "not_found", f"no session {session_id}")
        return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session is None:
            raise ServiceError(404, "not_found", f"no session {session_id}")
        session.cancel.set()
        worker = session.worker
        if worker is not None and worker.is_alive():
            worker.join(timeout=30.0)

    def start_cycle(
        self, session_id: str, generations: int, new_roi: RoiSpec | None
    ) -> int:
        session = self.get(session_id)
        with session.lock:
            if session.status == "running":
                raise ServiceError(
                    409, "cycle_in_progress", "a cycle is already running on this session"
                )
            if new_roi is not None:
                # validate now so the client gets the bound violation, not the worker
                _check_roi(new_roi, session.problem.m, session.h)
            session.status = "running"
            session.progress = 0.0
            session.cycle_counter += 1
            cycle = session.cycle_counter
        worker = threading.Thread(
            target=self._run_cycle,
            args=(session, cycle, generations, new_roi),
            daemon=True,
        )
        session.worker = worker
        worker.start()
        return cycle

    def _run_cycle(
        self, session: Session, cycle: int, generations: int, new_roi: RoiSpec | None
    ) -> None:
        try:
            rng = _cycle_rng(session.seed, cycle)
            problem = session.problem
            roi = session.roi if new_roi is None else new_roi
            refset = session.refset
            population = list(session.population)
            ideal = session.ideal.copy()

            if new_roi is not None:
                refset = map_reference_set(session.base, new_roi)
                population, ideal = _adapt_population(
                    problem, refset, population, ideal, rng, self.neighborhood
                )
            # captured after any re-matching: exactly what the first
            # generation of this cycle varies from
            initial_decisions = [ind.x.tolist() for ind in population]

            subproblems = build_subproblems(refset.points, self.neighborhood.size)
            from .optimizer import OptimizerState

            state = OptimizerState(
                subproblems=subproblems,
                population=population,
                ideal=ideal,
                generation=session.generation,
                rng_seed=session.seed,
            )
            for g in range(generations):
                if session.cancel.is_set():
                    return  # abort cooperatively; completed state stays untouched
                state = evolve_generation(
                    state, problem, rng, self.operators, self.neighborhood
                )
                session.progress = (g + 1) / generations

            F = np.vstack([ind.f for ind in state.population])
            record = CycleRecord(
                cycle=cycle,
                roi=roi.to_json(),
                generations=generations,
                initial_decisions=initial_decisions,
                decisions=[ind.x.tolist() for ind in state.population],
                objectives=F.tolist(),
                reference_points=refset.points.tolist(),
                metrics={
                    "ideal": state.ideal.tolist(),
                    "f_min": F.min(axis=0).tolist(),
                    "f_mean": F.mean(axis=0).tolist(),
                    "f_max": F.max(axis=0).tolist(),
                },
            )
            with session.lock:
                session.roi = roi
                session.refset = refset
                session.population = state.population
                session.ideal = state.ideal
                session.generation = state.generation
                session.history.append(record)
                session.status = "idle"
                session.progress = 1.0
            self._persist(session)
        except Exception:
            with session.lock:
                session.status = "idle"
            raise

    def _persist(self, session: Session) -> None:
        if self._persist_dir is None:
            return
        self._persist_dir.mkdir(parents=True, exist_ok=True)
        payload = session.snapshot()
        payload["cycles"] = [rec.to_json() for rec in session.history]
        target = self._persist_dir / f"{session.session_id}.json"
        # write-then-rename so a shutdown mid-write never leaves partial state
        with tempfile.NamedTemporaryFile(
            "w", dir=self._persist_dir, suffix=".tmp", delete=False, encoding="utf-8"
        ) as fh:
            json.dump(payload, fh)
            tmp_name = fh.name
        Path(tmp_name).replace(target)


def _adapt_population(
    problem: ProblemSpec,
    refset: ReferenceSet,
    population: list[Individual],
    ideal: np.ndarray,
    rng: np.random.Generator,
    neighborhood: NeighborhoodParams,
) -> tuple[list[Individual], np.ndarray]:
    """Re-match existing individuals to a new reference set, padding with
    random individuals when the set grew."""
    n_target = len(refset)
    candidates = list(population)
    if len(candidates) < n_target:
        X = rng.random((n_target - len(candidates), problem.n))
        F = evaluate_batch(problem, X)
        candidates += [Individual(x=X[i].copy(), f=F[i].copy()) for i in range(len(X))]
        ideal = np.minimum(ideal, F.min(axis=0))
    subproblems = build_subproblems(refset.points, neighborhood.size)
    assignment = stable_match(subproblems, candidates, ideal)
    return [candidates[j] for j in assignment], ideal


class ProblemBody(BaseModel):
    name: str
    m: int = Field(ge=2)
    n: int | None = None


class RoiBody(BaseModel):
    z_r: list[float]
    tau: float
    keep_boundary: bool = True


class LatticeBody(BaseModel):
    h: int = Field(ge=1)


class CreateSessionBody(BaseModel):
    problem: ProblemBody
    roi: RoiBody
    lattice: LatticeBody
    seed: int = 0


class CycleBody(BaseModel):
    generations: int = Field(ge=0)
    roi: RoiBody | None = None


def _to_roi(body: RoiBody, m: int) -> RoiSpec:
    if len(body.z_r) != m:
        raise ServiceError(
            400,
            "bad_roi",
            f"z_r has {len(body.z_r)} components but the problem has m={m}",
            pointer="/roi/z_r",
        )
    return RoiSpec(
        z_r=np.asarray(body.z_r, dtype=float),
        tau=body.tau,
        keep_boundary=body.keep_boundary,
    )


def create_app(static_dir: str | None = None, persist_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="prefmoo steering service", version=__version__)
    manager = SessionManager(persist_dir=persist_dir)
    app.state.manager = manager

    @app.exception_handler(ServiceError)
    async def service_error_handler(_req: Request, exc: ServiceError):
        body = {"code": exc.code, "message": str(exc)}
        if exc.pointer:
            body["pointer"] = exc.pointer
        return JSONResponse(status_code=exc.status, content=body)

    @app.exception_handler(ValidationError)
    async def validation_error_handler(_req: Request, exc: ValidationError):
        body = {"code": "validation", "message": str(exc)}
        if getattr(exc, "pointer", None):
            body["pointer"] = exc.pointer
        return JSONResponse(status_code=400, content=body)

    @app.exception_handler(RequestValidationError)
    async def request_validation_handler(_req: Request, exc: RequestValidationError):
        first = exc.errors()[0]
        pointer = "/" + "/".join(str(p) for p in first.get("loc", ()) if p != "body")
        return JSONResponse(
            status_code=400,
            content={"code": "validation", "message": first.get("msg", "invalid body"),
                     "pointer": pointer},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        problem = make_problem(body.problem.name, body.problem.m, body.problem.n)
        roi = _to_roi(body.roi, problem.m)
        session = manager.create(problem, roi, body.lattice.h, body.seed)
        return session.snapshot()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return manager.get(session_id).snapshot()

    @app.post("/sessions/{session_id}/cycles", status_code=202)
    def post_cycle(session_id: str, body: CycleBody):
        session = manager.get(session_id)
        roi = _to_roi(body.roi, session.problem.m) if body.roi is not None else None
        cycle = manager.start_cycle(session_id, body.generations, roi)
        return {"session_id": session_id, "cycle": cycle, "status": "running"}

    @app.get("/sessions/{session_id}/cycles/{k}")
    def get_cycle(session_id: str, k: int):
        session = manager.get(session_id)
        with session.lock:
            for rec in session.history:
                if rec.cycle == k:
                    return rec.to_json()
        raise ServiceError(404, "not_found", f"no completed cycle {k}")

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        manager.delete(session_id)
        return {"deleted": True, "session_id": session_id}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
