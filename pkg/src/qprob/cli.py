"""Command-line front end.

A thin client of the HTTP service: scenario files are read, turned into
request payloads and posted.  Without ``--url`` the requests run against the
service in-process (no server needed); with ``--url`` they go to a remote
instance.  ``qprob serve`` starts that instance.

Exit codes: 0 success / statistically consistent; 1 usage or parse failure;
2 domain-validation failure (including verify-property failures); 3
statistical inconsistency; 4 inconclusive simulation (zero accepted trials).
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any

import httpx

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_INCONSISTENT = 3
EXIT_INCONCLUSIVE = 4

_SIG = ".12g"  # probabilities are printed with 12 significant digits


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _parse_tolerance_overrides(text: str | None) -> dict[str, float] | None:
    if not text:
        return None
    result: dict[str, float] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise _CliError(EXIT_USAGE, f"bad tolerance override {item!r}; expected name=value")
        try:
            result[name.strip()] = float(value)
        except ValueError:
            raise _CliError(EXIT_USAGE, f"bad tolerance value in {item!r}") from None
    return result or None


def _load_document(path: str) -> dict[str, Any]:
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(EXIT_USAGE, f"cannot read {path}: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_USAGE, f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise _CliError(EXIT_USAGE, f"{path} must contain a JSON object")
    return document


async def _post_async(url: str | None, route: str, payload: dict[str, Any]) -> httpx.Response:
    if url:
        async with httpx.AsyncClient(base_url=url, timeout=300.0) as client:
            return await client.post(route, json=payload)
    from .service.app import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://qprob.internal") as client:
        return await client.post(route, json=payload)


def _post(url: str | None, route: str, payload: dict[str, Any]) -> dict[str, Any]:
    try:
        response = asyncio.run(_post_async(url, route, payload))
    except httpx.HTTPError as exc:
        raise _CliError(EXIT_USAGE, f"request failed: {exc}") from exc
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = response.text
    if isinstance(detail, dict) and detail.get("category") == "domain":
        raise _CliError(EXIT_DOMAIN, detail.get("message", "domain validation failed"))
    if isinstance(detail, dict):
        raise _CliError(EXIT_USAGE, detail.get("message", "bad request"))
    raise _CliError(EXIT_USAGE, f"request rejected ({response.status_code}): {detail}")


def _print_meta(body: dict[str, Any]) -> None:
    meta = body["meta"]
    print(f"command: {meta['command']}")
    print(f"input:   {meta['input_digest']}")
    print(f"version: {meta['version']}")


def _emit(body: dict[str, Any], machine: bool, renderer) -> None:
    if machine:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        renderer(body)


def _render_predict(body: dict[str, Any]) -> None:
    _print_meta(body)
    if body["standard"]:
        print(f"standard reduction: yes (K = {body['identity_scale']:{_SIG}})")
    else:
        print("standard reduction: no (general law used)")
    print(f"denominator Tr(X rho): {body['denominator']:{_SIG}}")
    print("outcome probabilities:")
    for label, value in body["probabilities"].items():
        print(f"  {label:>12}  {value:{_SIG}}")


def _render_retrodict(body: dict[str, Any]) -> None:
    _print_meta(body)
    print("preparation posteriors (direct | via duality):")
    for label, value in body["posterior"].items():
        dual = body["duality_posterior"][label]
        print(f"  {label:>12}  {value:{_SIG}} | {dual:{_SIG}}")
    print(f"max discrepancy: {body['max_discrepancy']:.3e}")


def _render_simulate(body: dict[str, Any]) -> None:
    _print_meta(body)
    print(f"samples: {body['samples']}, accepted: {body['accepted']}")
    if body["inconclusive"]:
        print("INCONCLUSIVE: no trial survived post-selection")
        return
    print("quantity         label         analytic        empirical    gap/stderr")
    for row in body["comparisons"]:
        ratio = row["gap_over_stderr"]
        ratio_text = "n/a" if ratio is None else f"{ratio:.2f}"
        print(
            f"{row['quantity']:<12} {row['label']:>9}  {row['analytic']:>15.12g} "
            f"{row['empirical']:>15.12g}  {ratio_text:>10}"
        )
    print(f"statistically consistent: {'yes' if body['consistent'] else 'NO'}")


def _render_verify(body: dict[str, Any]) -> None:
    _print_meta(body)
    print("property         dim   max violation   threshold   status")
    for row in body["properties"]:
        status = "pass" if row["passed"] else "FAIL"
        print(
            f"{row['name']:<16} {row['dim']:>3}   {row['max_violation']:>13.3e}   "
            f"{row['threshold']:>9.0e}   {status}"
        )
    failed = [row for row in body["properties"] if not row["passed"]]
    if failed:
        print("violating cases (replayable):")
        for row in failed:
            print(f"  {json.dumps(row['case'], sort_keys=True)}")
    print(f"all properties passed: {'yes' if body['all_passed'] else 'NO'}")


def _cmd_predict(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    payload = {
        "dimension": document.get("dimension"),
        "procedure": document.get("procedure"),
        "state": document.get("state"),
        "ensemble": document.get("ensemble"),
        "recorded": document.get("recorded"),
        "tolerance_overrides": _parse_tolerance_overrides(args.tolerance_overrides),
    }
    body = _post(args.url, "/predict", payload)
    _emit(body, args.machine_readable, _render_predict)
    return EXIT_OK


def _cmd_retrodict(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    payload = {
        "dimension": document.get("dimension"),
        "ensemble": document.get("ensemble"),
        "procedure": document.get("procedure"),
        "observed": document.get("observed"),
        "tolerance_overrides": _parse_tolerance_overrides(args.tolerance_overrides),
    }
    body = _post(args.url, "/retrodict", payload)
    _emit(body, args.machine_readable, _render_retrodict)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    payload = {
        "dimension": document.get("dimension"),
        "ensemble": document.get("ensemble"),
        "procedure": document.get("procedure"),
        "recorded": document.get("recorded"),
        "samples": args.samples if args.samples is not None else document.get("samples", 100_000),
        "seed": args.seed if args.seed is not None else document.get("seed", 0),
        "analytic_offset": document.get("analytic_offset", 0.0),
        "tolerance_overrides": _parse_tolerance_overrides(args.tolerance_overrides),
    }
    body = _post(args.url, "/simulate", payload)
    _emit(body, args.machine_readable, _render_simulate)
    if body["inconclusive"]:
        return EXIT_INCONCLUSIVE
    if not body["consistent"]:
        return EXIT_INCONSISTENT
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        dims = [int(d) for d in args.dims.split(",") if d.strip()]
    except ValueError:
        raise _CliError(EXIT_USAGE, f"bad --dims value {args.dims!r}") from None
    if not dims:
        raise _CliError(EXIT_USAGE, "--dims must list at least one dimension")
    payload = {
        "seed": args.seed if args.seed is not None else 0,
        "dims": dims,
        "inject_nonadditive_frame": args.inject_nonadditive_frame,
        "tolerance_overrides": _parse_tolerance_overrides(args.tolerance_overrides),
    }
    body = _post(args.url, "/verify", payload)
    _emit(body, args.machine_readable, _render_verify)
    return EXIT_OK if body["all_passed"] else EXIT_DOMAIN


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("qprob.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qprob",
        description="Generalized quantum measurement probabilities: "
        "predict, retrodict, simulate and verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--url", default=None, help="remote service URL (default: in-process)")
        p.add_argument("--machine-readable", action="store_true", help="emit the raw JSON report")
        p.add_argument(
            "--tolerance-overrides",
            default=None,
            metavar="NAME=VALUE,...",
            help="override numerical tolerances for this run",
        )

    predict = sub.add_parser("predict", help="outcome distribution of a procedure on a state")
    predict.add_argument("--file", required=True, help="scenario document (JSON)")
    common(predict)
    predict.set_defaults(func=_cmd_predict)

    retro = sub.add_parser("retrodict", help="preparation probabilities given an observed outcome")
    retro.add_argument("--file", required=True, help="scenario document (JSON)")
    common(retro)
    retro.set_defaults(func=_cmd_retrodict)

    simulate = sub.add_parser("simulate", help="Monte-Carlo post-selection run with analytic comparison")
    simulate.add_argument("--file", required=True, help="scenario document (JSON)")
    simulate.add_argument("--samples", type=int, default=None, help="override trial count")
    simulate.add_argument("--seed", type=int, default=None, help="override RNG seed")
    common(simulate)
    simulate.set_defaults(func=_cmd_simulate)

    verify = sub.add_parser("verify", help="run the numerical property battery")
    verify.add_argument("--seed", type=int, default=None, help="battery seed (default 0)")
    verify.add_argument("--dims", default="2,3,4", help="comma-separated dimensions")
    verify.add_argument(
        "--inject-nonadditive-frame",
        action="store_true",
        help="test hook: feed the battery a non-additive frame evaluator",
    )
    common(verify)
    verify.set_defaults(func=_cmd_verify)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
