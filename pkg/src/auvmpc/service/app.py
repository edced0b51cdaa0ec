"""FastAPI application exposing the simulation and experiment drivers.

All handlers are synchronous on purpose: the work is CPU-bound and the
framework dispatches them to a worker thread.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, collocation, harness, reports
from ..scenario import Scenario
from . import schemas


def _run_summary(name: str, log: harness.SimLog) -> schemas.RunSummaryModel:
    l = log.ledger
    invoked = float(np.mean(log.solver_invoked)) if log.steps else 0.0
    return schemas.RunSummaryModel(
        controller=name,
        energy=schemas.LedgerModel(surge_J=l.surge, heave_J=l.heave,
                                   pitch_J=l.pitch, yaw_J=l.yaw,
                                   total_J=l.total, t_travel_s=l.t_travel),
        travel_time_s=log.t_travel, avg_solve_s=log.avg_solve_time,
        total_solve_s=log.total_solve_time,
        solver_invoked_fraction=invoked,
        constraint_violations=harness.audit_constraints(log))


def _scenario_or_422(model: schemas.ScenarioModel) -> Scenario:
    try:
        return model.to_scenario()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="auvmpc", version=__version__,
                  description="Energy-optimal AUV point-to-point motion "
                              "control: simulation runs, controller "
                              "comparisons and batch sweeps.")

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        sc = _scenario_or_422(req.scenario)
        try:
            log = harness.run_scenario(sc)
        except harness.MaxSimTimeExceeded as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        summary = _run_summary(sc.controller, log)
        files = {
            "trace.csv": reports.trace_csv(log),
            "decisions.csv": reports.decisions_csv(log),
            "summary.csv": reports.summary_csv(
                [reports.summary_row(sc.controller, log)]),
        }
        return schemas.SimulateResponse(summary=summary, files=files)

    @app.post("/compare", response_model=schemas.CompareResponse)
    def compare(req: schemas.SimulateRequest) -> schemas.CompareResponse:
        sc = _scenario_or_422(req.scenario)
        try:
            report = harness.compare_controllers(sc)
        except (harness.MaxSimTimeExceeded, collocation.CollocationError) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        rows = [schemas.ComparisonRowModel(
            controller=r.controller, travel_time_s=r.travel_time,
            energy_J=r.energy, loss_pct=r.loss_pct,
            avg_solve_s=r.avg_solve_time, total_solve_s=r.total_solve_time)
            for r in report.rows]
        files = {"comparison.txt": reports.comparison_table(report),
                 "summary.csv": reports.summary_csv(
                     [reports.summary_row(name, log)
                      for name, log in report.logs.items()])}
        for name, log in report.logs.items():
            files[f"trace_{name}.csv"] = reports.trace_csv(log)
        return schemas.CompareResponse(rows=rows, files=files)

    @app.post("/sweep/horizon", response_model=schemas.HorizonSweepResponse)
    def sweep_horizon(req: schemas.HorizonSweepRequest) -> schemas.HorizonSweepResponse:
        sc = _scenario_or_422(req.scenario)
        try:
            points = harness.sweep_horizon(sc, req.horizons, req.timing_repeats)
        except (ValueError, harness.MaxSimTimeExceeded) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        baseline = None
        if req.include_baseline:
            baseline = collocation.solve(collocation.CollocationProblem(
                params=sc.params, x0=sc.x0, x_f=sc.x_f, u0=sc.u0,
                n=sc.oracle_segments, t_min=sc.t_min, t_max=sc.t_max)).energy
        files = {"horizon.csv": reports.horizon_csv(points),
                 "horizon.txt": reports.horizon_report(points, baseline)}
        return schemas.HorizonSweepResponse(
            points=[schemas.HorizonPointModel(
                horizon=p.horizon, energy_J=p.energy,
                travel_time_s=p.travel_time, avg_solve_s=p.avg_solve_time,
                max_solve_s=p.max_solve_time) for p in points],
            baseline_energy_J=baseline, files=files)

    @app.post("/sweep/ic", response_model=schemas.IcSweepResponse)
    def sweep_ic(req: schemas.IcSweepRequest) -> schemas.IcSweepResponse:
        sc = _scenario_or_422(req.scenario)
        bad = [x for x in req.x0_values if x > sc.x_f]
        if bad:
            raise HTTPException(status_code=422,
                                detail=f"x0 values beyond x_f: {bad}")
        cells = harness.sweep_initial_conditions(
            sc, req.x0_values, req.u0_values, tuple(req.controllers),
            oracle_segments=req.oracle_segments)
        files = {"ic_sweep.csv": reports.ic_sweep_csv(cells),
                 "ic_sweep.txt": reports.ic_sweep_report(cells)}
        return schemas.IcSweepResponse(
            cells=[schemas.SweepCellModel(
                x0=c.x0, u0=c.u0, controller=c.controller, energy_J=c.energy,
                travel_time_s=c.travel_time, oracle_J=c.oracle_energy,
                gap_J=c.gap, gap_pct=c.gap_pct, error=c.error) for c in cells],
            files=files)

    @app.post("/oracle", response_model=schemas.OracleResponse)
    def oracle(req: schemas.OracleRequest) -> schemas.OracleResponse:
        sc = _scenario_or_422(req.scenario)
        problem = collocation.CollocationProblem(
            params=sc.params, x0=sc.x0, x_f=sc.x_f, u0=sc.u0,
            n=sc.oracle_segments, t_min=sc.t_min, t_max=sc.t_max)
        try:
            sol = collocation.solve(problem)
        except collocation.CollocationError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        files = {"solution.csv": sol.csv_rows(),
                 "oracle.txt": reports.oracle_report(sol)}
        return schemas.OracleResponse(
            energy_J=sol.energy, t_travel_s=sol.t_travel,
            defect_violation=sol.defect_violation,
            kkt_residual=sol.kkt_residual, files=files)

    return app


app = create_app()
