"""Command-line client for the simulation service.

Each subcommand reads a scenario file, posts it to the service and writes the
returned artifacts into the output directory.  Without ``--server`` the
request is dispatched to an in-process application instance over the same
HTTP interface, so local use needs no running server.
"""

from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

from .scenario import scenario_from_file
from .service.schemas import scenario_to_model


def _post(server: str | None, path: str, payload: dict) -> dict:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            response = client.post(path, json=payload)
    else:
        from .service.app import create_app

        async def _go() -> httpx.Response:
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://auvmpc.local",
                                         timeout=None) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(_go())
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise SystemExit(f"error ({response.status_code}): {detail}")
    return response.json()


def _write_files(outdir: str, files: dict[str, str]) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        (out / name).write_text(content)
        print(f"wrote {out / name}")


def _scenario_payload(path: str) -> dict:
    model = scenario_to_model(scenario_from_file(path))
    return model.model_dump()


def _cmd_simulate(args) -> None:
    data = _post(args.server, "/simulate",
                 {"scenario": _scenario_payload(args.scenario)})
    s = data["summary"]
    print(f"{s['controller']}: {s['energy']['total_J']:.3f} J in "
          f"{s['travel_time_s']:.2f} s "
          f"(avg solve {1e3 * s['avg_solve_s']:.2f} ms)")
    if s["constraint_violations"]:
        print("constraint violations:")
        for v in s["constraint_violations"]:
            print(f"  {v}")
    _write_files(args.outdir, data["files"])


def _cmd_compare(args) -> None:
    data = _post(args.server, "/compare",
                 {"scenario": _scenario_payload(args.scenario)})
    print(data["files"]["comparison.txt"], end="")
    _write_files(args.outdir, data["files"])


def _cmd_sweep_horizon(args) -> None:
    payload = {"scenario": _scenario_payload(args.scenario),
               "horizons": args.horizons,
               "timing_repeats": args.timing_repeats}
    data = _post(args.server, "/sweep/horizon", payload)
    print(data["files"]["horizon.txt"], end="")
    _write_files(args.outdir, data["files"])


def _cmd_sweep_ic(args) -> None:
    payload = {"scenario": _scenario_payload(args.scenario),
               "x0_values": args.x0, "u0_values": args.u0,
               "controllers": args.controllers,
               "oracle_segments": args.oracle_segments}
    data = _post(args.server, "/sweep/ic", payload)
    print(data["files"]["ic_sweep.txt"], end="")
    _write_files(args.outdir, data["files"])


def _cmd_oracle(args) -> None:
    data = _post(args.server, "/oracle",
                 {"scenario": _scenario_payload(args.scenario)})
    print(f"baseline: {data['energy_J']:.4f} J in {data['t_travel_s']:.3f} s "
          f"(defect {data['defect_violation']:.2e})")
    _write_files(args.outdir, data["files"])


def _cmd_serve(args) -> None:
    import uvicorn

    uvicorn.run("auvmpc.service.app:app", host=args.host, port=args.port)


def _add_io_args(sub) -> None:
    sub.add_argument("scenario", help="scenario file path")
    sub.add_argument("-o", "--outdir", default="out", help="output directory")
    sub.add_argument("--server", default=None,
                     help="base URL of a running service (default: in-process)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auvmpc",
        description="Energy-optimal AUV point-to-point motion control runs")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="run one closed-loop scenario")
    _add_io_args(p)
    p.set_defaults(func=_cmd_simulate)

    p = subs.add_parser("compare",
                        help="baseline + all controllers on one scenario")
    _add_io_args(p)
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("sweep-horizon", help="prediction-horizon sweep")
    _add_io_args(p)
    p.add_argument("--horizons", type=int, nargs="+",
                   default=[5, 10, 15, 20, 25])
    p.add_argument("--timing-repeats", type=int, default=10)
    p.set_defaults(func=_cmd_sweep_horizon)

    p = subs.add_parser("sweep-ic", help="initial-condition robustness sweep")
    _add_io_args(p)
    p.add_argument("--x0", type=float, nargs="+",
                   default=[0.0, 2.0, 4.0, 6.0, 8.0, 10.0])
    p.add_argument("--u0", type=float, nargs="+",
                   default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    p.add_argument("--controllers", nargs="+",
                   choices=["t-mpc", "eo-mpc", "rteo-mpc"],
                   default=["rteo-mpc", "t-mpc"])
    p.add_argument("--oracle-segments", type=int, default=150)
    p.set_defaults(func=_cmd_sweep_ic)

    p = subs.add_parser("oracle", help="solve the collocation baseline only")
    _add_io_args(p)
    p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main(sys.argv[1:])
