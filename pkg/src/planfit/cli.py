"""Operator CLI: serve the HTTP API, validate plans, synthesize, run the suite."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import load_catalog
from .config import ServiceConfig, load_config
from .errors import PlanfitError
from .guidelines import evaluate
from .harness import load_fixtures, make_orchestrator_config, run_suite, write_reports
from .orchestrator import OrchestratorConfig
from .plan import parse_plan_xml, serialize_plan_xml
from .providers import ProviderConfig
from .summary import PlanSummary
from .synthesis import resolve_exercises, synthesize


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planfit",
        description="Conversational weekly exercise planner",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--catalog", dest="catalog_path", help="exercise catalog CSV")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--data-dir", dest="data_dir")
    serve.add_argument(
        "--provider", dest="provider_mode", choices=["template", "scripted", "remote"]
    )
    serve.add_argument("--model", dest="model_name")

    validate = sub.add_parser("validate", help="check a plan XML file against the guidelines")
    validate.add_argument("plan_xml", help="file containing the plan markup")

    synth = sub.add_parser("synth", help="synthesize a plan from a summary JSON file")
    synth.add_argument("summary_json")

    evaluate_cmd = sub.add_parser("eval", help="replay persona fixtures and write reports")
    evaluate_cmd.add_argument(
        "personas_dir", nargs="?", default=None, help="fixture directory (bundled by default)"
    )
    evaluate_cmd.add_argument("--out", default="eval-out", help="report output directory")
    return parser


def _service_config(args: argparse.Namespace) -> ServiceConfig:
    overrides = {
        k: getattr(args, k, None)
        for k in (
            "host",
            "port",
            "data_dir",
            "provider_mode",
            "model_name",
            "catalog_path",
        )
    }
    return load_config(overrides, config_file=args.config)


def _load_indexed_catalog(config: ServiceConfig):
    catalog = load_catalog(config.catalog_path)
    catalog.build_index(OrchestratorConfig().retrieval)
    return catalog


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import build_store, create_app

    config = _service_config(args)
    provider_config = ProviderConfig(
        mode=config.provider_mode,
        model_name=config.model_name,
        endpoint=config.endpoint,
        api_key=config.api_key,
    )
    store = build_store(config.catalog_path, provider_config, config.data_dir)
    app = create_app(store)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    config = _service_config(args)
    catalog = _load_indexed_catalog(config)
    text = Path(args.plan_xml).read_text(encoding="utf-8")
    plan = resolve_exercises(parse_plan_xml(text), catalog)
    report = evaluate(plan, catalog)
    print(json.dumps(report.to_json(), indent=2))
    return 0 if report.all_ok else 1


def cmd_synth(args: argparse.Namespace) -> int:
    config = _service_config(args)
    catalog = _load_indexed_catalog(config)
    data = json.loads(Path(args.summary_json).read_text(encoding="utf-8"))
    summary = PlanSummary.from_json(data)
    result = synthesize(summary, catalog)
    print(serialize_plan_xml(result.plan))
    print(json.dumps(result.report.to_json(), indent=2))
    for advisory in result.advisories:
        print(f"advisory [{advisory.kind}]: {advisory.message}", file=sys.stderr)
    return 0 if result.report.all_ok else 1


def cmd_eval(args: argparse.Namespace) -> int:
    config = _service_config(args)
    catalog = load_catalog(config.catalog_path)
    catalog.build_index(make_orchestrator_config().retrieval)
    fixtures = load_fixtures(args.personas_dir)
    suite = run_suite(fixtures, catalog)
    json_path, md_path = write_reports(suite, args.out)
    compliance = suite.compliance()
    for check, row in compliance.items():
        print(f"{check}: {row['count']}/{row['total']} ({row['percent']}%)")
    print(f"reports written to {json_path} and {md_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "validate": cmd_validate,
        "synth": cmd_synth,
        "eval": cmd_eval,
    }
    try:
        return handlers[args.command](args)
    except PlanfitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
