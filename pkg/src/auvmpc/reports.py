"""CSV and plain-text emission for runs, comparisons and sweeps."""

from __future__ import annotations

import io

from .collocation import CollocationSolution
from .harness import ComparisonReport, HorizonPoint, SimLog, SweepCell

TRACE_HEADER = ("t,x,y,z,phi,theta,psi,u,v,w,p,q,r,"
                "T1,T2,T3,T4,T_total,solver_invoked,solve_time_s")
SUMMARY_HEADER = ("controller,surge_J,heave_J,pitch_J,yaw_J,total_J,"
                  "travel_time_s,avg_solve_s,total_solve_s")


def trace_csv(log: SimLog) -> str:
    out = io.StringIO()
    out.write(TRACE_HEADER + "\n")
    for k in range(log.steps):
        eta, nu, thr = log.eta[k], log.nu[k], log.thrusters[k]
        fields = [log.t[k], *eta[:3], *eta[3:], *nu[:3], *nu[3:],
                  *thr, log.T_total[k]]
        out.write(",".join(f"{v:.9g}" for v in fields))
        out.write(f",{int(log.solver_invoked[k])},{log.solve_time[k]:.6e}\n")
    return out.getvalue()


def decisions_csv(log: SimLog) -> str:
    """Per-step controller decision stream."""
    lines = ["t,T_total,solver_invoked,solve_time_s,predicted_cost_J"]
    for k in range(log.steps):
        lines.append(f"{log.t[k]:.9g},{log.T_total[k]:.9g},"
                     f"{int(log.solver_invoked[k])},{log.solve_time[k]:.6e},"
                     f"{log.predicted_cost[k]:.9g}")
    return "\n".join(lines) + "\n"


def summary_row(controller: str, log: SimLog) -> str:
    l = log.ledger
    return (f"{controller},{l.surge:.9g},{l.heave:.9g},{l.pitch:.9g},"
            f"{l.yaw:.9g},{l.total:.9g},{log.t_travel:.9g},"
            f"{log.avg_solve_time:.6e},{log.total_solve_time:.6e}")


def summary_csv(rows: list[str]) -> str:
    return SUMMARY_HEADER + "\n" + "\n".join(rows) + "\n"


def comparison_table(report: ComparisonReport) -> str:
    """Side-by-side energy/time/computation table for one scenario."""
    lines = []
    lines.append("Performance comparison")
    lines.append(f"{'Strategy':<10} {'Travel Time (s)':>16} {'Energy (J)':>12} {'Loss (%)':>10}")
    for row in report.rows:
        loss = "--" if row.loss_pct is None else f"{row.loss_pct:.2f}"
        lines.append(f"{row.controller:<10} {row.travel_time:>16.2f} "
                     f"{row.energy:>12.2f} {loss:>10}")
    lines.append("")
    lines.append("Computation time comparison")
    lines.append(f"{'Strategy':<10} {'Avg solve (s)':>14} {'Total solve (s)':>16}")
    for row in report.rows:
        if row.avg_solve_time is None:
            continue
        lines.append(f"{row.controller:<10} {row.avg_solve_time:>14.6f} "
                     f"{row.total_solve_time:>16.4f}")
    return "\n".join(lines) + "\n"


def horizon_csv(points: list[HorizonPoint]) -> str:
    lines = ["horizon,energy_J,travel_time_s,avg_solve_s,max_solve_s"]
    for p in points:
        lines.append(f"{p.horizon},{p.energy:.9g},{p.travel_time:.9g},"
                     f"{p.avg_solve_time:.6e},{p.max_solve_time:.6e}")
    return "\n".join(lines) + "\n"


def horizon_report(points: list[HorizonPoint], oracle_energy: float | None) -> str:
    lines = ["Prediction-horizon sweep (energy-optimal controller)"]
    for p in points:
        gap = ""
        if oracle_energy:
            gap = f"  ({100.0 * (p.energy - oracle_energy) / oracle_energy:+.2f}% vs baseline)"
        lines.append(f"N={p.horizon:3d}: {p.energy:8.3f} J in {p.travel_time:6.2f} s, "
                     f"avg solve {1e3 * p.avg_solve_time:6.3f} ms, "
                     f"max solve {1e3 * p.max_solve_time:6.3f} ms{gap}")
    return "\n".join(lines) + "\n"


def ic_sweep_csv(cells: list[SweepCell]) -> str:
    lines = ["x0,u0,controller,energy_J,travel_time_s,oracle_J,gap_J,gap_pct,error"]
    for c in cells:
        def fmt(v):
            return "" if v is None else f"{v:.9g}"
        lines.append(f"{c.x0:.9g},{c.u0:.9g},{c.controller},{fmt(c.energy)},"
                     f"{fmt(c.travel_time)},{c.oracle_energy:.9g},{fmt(c.gap)},"
                     f"{fmt(c.gap_pct)},{c.error}")
    return "\n".join(lines) + "\n"


def ic_sweep_report(cells: list[SweepCell]) -> str:
    controllers = sorted({c.controller for c in cells})
    lines = ["Initial-condition robustness sweep: closed-loop energy minus baseline (%)"]
    for name in controllers:
        sel = [c for c in cells if c.controller == name]
        u0s = sorted({c.u0 for c in sel})
        x0s = sorted({c.x0 for c in sel})
        lines.append(f"\n{name}:")
        lines.append("x0\\u0  " + " ".join(f"{u:>8.2f}" for u in u0s))
        for x0 in x0s:
            row = []
            for u0 in u0s:
                cell = next(c for c in sel if c.x0 == x0 and c.u0 == u0)
                row.append("   error" if cell.error else
                           ("    --  " if cell.gap_pct is None else f"{cell.gap_pct:8.2f}"))
            lines.append(f"{x0:<6.1f} " + " ".join(row))
    return "\n".join(lines) + "\n"


def oracle_report(sol: CollocationSolution) -> str:
    return (f"minimum-energy transfer: {sol.energy:.4f} J in {sol.t_travel:.3f} s\n"
            f"defect violation: {sol.defect_violation:.3e}\n"
            f"stationarity residual: {sol.kkt_residual:.3e}\n"
            f"converged: {sol.converged}\n")
