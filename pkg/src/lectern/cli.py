"""``lectern`` command-line client.

Talks to a running service (remote mode) or drives the engine and store
in-process (local mode). Remote mode is used whenever an endpoint is known
from ``--endpoint``, ``LECTERN_ENDPOINT`` or the config file, unless
``--local`` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import platformdirs

from .api.service import ApiError, LectureService, to_api_error
from .api.settings import Settings, tomllib
from .embed import BACKENDS, POOLINGS
from .errors import LecternError
from .store import Store
from .summarize import METHODS, Engine, SummaryParams

ENDPOINT_ENV = "LECTERN_ENDPOINT"
PLOT_COLUMNS = ("original_index", "x", "y", "cluster", "text")

# operation -> (HTTP verb, path template, takes a JSON body)
ROUTES = {
    "create_lecture": ("POST", "/lectures", True),
    "list_lectures": ("GET", "/lectures", False),
    "get_lecture": ("GET", "/lectures/{}", False),
    "update_lecture": ("PUT", "/lectures/{}", True),
    "delete_lecture": ("DELETE", "/lectures/{}", False),
    "convert_srt": ("POST", "/lectures/convert-srt", True),
    "create_summary": ("POST", "/lectures/{}/summaries", True),
    "list_summaries": ("GET", "/lectures/{}/summaries", False),
    "get_summary": ("GET", "/summaries/{}", False),
    "delete_summary": ("DELETE", "/summaries/{}", False),
}


class UsageError(Exception):
    pass


def config_path() -> Path:
    return Path(platformdirs.user_config_dir("lectern")) / "config.toml"


def default_storage() -> str:
    return str(Path(platformdirs.user_data_dir("lectern")) / "lectern.db")


@dataclass
class CliConfig:
    endpoint: str | None = None
    mode: str = "local"
    storage_path: str | None = None
    output: str = "text"

    def __post_init__(self) -> None:
        if self.mode == "remote" and not self.endpoint:
            raise UsageError("remote mode requires an endpoint")


def _file_config(path: Path) -> dict:
    if not path.is_file():
        return {}
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return data.get("cli", data)


def resolve_config(args, env=None) -> CliConfig:
    env = os.environ if env is None else env
    file_cfg = _file_config(Path(args.config) if args.config else config_path())
    endpoint = args.endpoint or env.get(ENDPOINT_ENV) or file_cfg.get("endpoint")
    mode = "local" if args.local or not endpoint else "remote"
    storage = args.storage or file_cfg.get("storage") or default_storage()
    return CliConfig(endpoint=endpoint, mode=mode, storage_path=storage, output=args.output)


class LocalClient:
    def __init__(self, storage_path: str, model_path: str | None = None) -> None:
        overrides = {"storage_path": storage_path}
        if model_path:
            overrides["model_path"] = model_path
        self.settings = Settings.load().with_values(**overrides)
        self.store = Store(self.settings.storage_path)
        self.engine = Engine(model_path=self.settings.model_path)
        self.service = LectureService(self.store, self.engine, self.settings)

    def call(self, op: str, *args):
        return self.service.call(op, *args)[1]

    def close(self) -> None:
        self.service.close()
        self.store.close()


class RemoteClient:
    def __init__(self, endpoint: str, timeout: float = 150.0) -> None:
        import httpx

        self._httpx = httpx
        self.http = httpx.Client(base_url=endpoint.rstrip("/"), timeout=timeout)

    def call(self, op: str, *args):
        verb, template, has_body = ROUTES[op]
        n_path = template.count("{}")
        path = template.format(*args[:n_path])
        kwargs = {}
        if has_body:
            body = args[n_path]
            if isinstance(body, (bytes, str)):
                kwargs["content"] = body
            else:
                kwargs["json"] = body
        try:
            response = self.http.request(verb, path, **kwargs)
        except self._httpx.HTTPError as exc:
            raise ApiError(503, "unreachable", f"cannot reach service: {exc}") from None
        try:
            doc = response.json()
        except ValueError:
            raise ApiError(response.status_code, "bad_response", response.text[:200]) from None
        if response.is_error:
            if isinstance(doc, dict) and {"status", "code", "message"} <= set(doc):
                raise ApiError(doc["status"], doc["code"], doc["message"])
            raise ApiError(response.status_code, "bad_response", str(doc))
        return doc

    def close(self) -> None:
        self.http.close()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lectern", description="Extractive lecture summarization client.")
    parser.add_argument("--endpoint", help="service base URL (enables remote mode)")
    parser.add_argument("--local", action="store_true", help="use the embedded engine even if an endpoint is set")
    parser.add_argument("--storage", help="SQLite file for local mode")
    parser.add_argument("--model", help="model artifact directory for the transformer backend")
    parser.add_argument("--config", help="config file (default: platform config dir)")
    parser.add_argument("--output", choices=("text", "json"), default="text")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)

    lecture = commands.add_parser("lecture", help="manage lectures")
    lecture_cmds = lecture.add_subparsers(dest="action", parser_class=_Parser)
    add = lecture_cmds.add_parser("add", help="upload a transcript")
    add.add_argument("--name", required=True)
    source = add.add_mutually_exclusive_group(required=True)
    source.add_argument("--file", help="plain-text transcript")
    source.add_argument("--srt", help="SubRip subtitle file, converted to paragraph text")
    lecture_cmds.add_parser("list", help="list lectures")
    for action in ("get", "delete"):
        sub = lecture_cmds.add_parser(action)
        sub.add_argument("id")

    summary = commands.add_parser("summary", help="manage summaries")
    summary_cmds = summary.add_subparsers(dest="action", parser_class=_Parser)
    create = summary_cmds.add_parser("create", help="summarize a stored lecture")
    create.add_argument("--lecture", required=True)
    create.add_argument("--name", default="")
    _add_param_args(create, size_required=True)
    listing = summary_cmds.add_parser("list", help="list a lecture's summaries")
    listing.add_argument("--lecture", required=True)
    for action in ("get", "delete"):
        sub = summary_cmds.add_parser(action)
        sub.add_argument("id")

    plot = commands.add_parser("plot-data", help="2D PCA coordinates and cluster ids as CSV")
    plot.add_argument("--lecture", required=True)
    _add_param_args(plot, size_required=False)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    return parser


def _add_param_args(parser, size_required: bool) -> None:
    size = parser.add_mutually_exclusive_group(required=size_required)
    size.add_argument("--count", type=int)
    size.add_argument("--ratio", type=float)
    if size_required:
        parser.add_argument("--method", choices=METHODS, default="cluster")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--embedder", choices=[b for b in BACKENDS if b != "ensemble"])
    parser.add_argument("--layer-offset", type=int)
    parser.add_argument("--pooling", choices=POOLINGS)


def _param_body(args) -> dict:
    body = {}
    for key in ("count", "ratio", "seed"):
        if getattr(args, key, None) is not None:
            body[key] = getattr(args, key)
    if getattr(args, "method", None):
        body["method"] = args.method
    embedder = {}
    if args.embedder:
        embedder["backend"] = args.embedder
    if args.layer_offset is not None:
        embedder["layer_offset"] = args.layer_offset
    if args.pooling:
        embedder["pooling"] = args.pooling
    if embedder:
        body["embedder"] = embedder
    return body


def _read(path: str, binary: bool = False):
    try:
        return Path(path).read_bytes() if binary else Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _plot_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(",".join(PLOT_COLUMNS) + "\n")
    writer = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    for row in rows:
        writer.writerow([row[c] for c in PLOT_COLUMNS])
    return buf.getvalue()


def _lecture_line(doc: dict) -> str:
    return f"{doc['id']}\t{doc['name']}\t{doc['created_at']}"


def _summary_line(doc: dict) -> str:
    return f"{doc['id']}\t{doc['name']}\t{len(doc['sentence_indices'])} sentences\t{doc['created_at']}"


def _execute(args, client, local_settings: Settings | None) -> tuple[object, str]:
    """Run one command; return (json document, text rendering)."""
    cmd, action = args.command, getattr(args, "action", None)
    if cmd == "lecture":
        if action == "add":
            if args.srt:
                content = client.call("convert_srt", _read(args.srt, binary=True))["paragraph"]
            else:
                content = _read(args.file)
            doc = client.call("create_lecture", {"name": args.name, "content": content})
            return doc, _lecture_line(doc)
        if action == "list":
            docs = client.call("list_lectures")
            return docs, "\n".join(_lecture_line(d) for d in docs)
        if action == "get":
            doc = client.call("get_lecture", args.id)
            return doc, f"{_lecture_line(doc)}\n\n{doc['content']}"
        doc = client.call("delete_lecture", args.id)
        return doc, f"deleted lecture {doc['id']}"
    if cmd == "summary":
        if action == "create":
            body = {"name": args.name, **_param_body(args)}
            doc = client.call("create_summary", args.lecture, body)
            return doc, doc["text"]
        if action == "list":
            docs = client.call("list_summaries", args.lecture)
            return docs, "\n".join(_summary_line(d) for d in docs)
        if action == "get":
            doc = client.call("get_summary", args.id)
            return doc, doc["text"]
        doc = client.call("delete_summary", args.id)
        return doc, f"deleted summary {doc['id']}"
    # plot-data: fetch the lecture through the client, compute locally
    lecture = client.call("get_lecture", args.lecture)
    settings = local_settings or Settings.load().with_values(model_path=args.model)
    body = _param_body(args)
    if "count" not in body and "ratio" not in body:
        body["count"] = 5
    try:
        params = SummaryParams.from_dict(body, default_backend=settings.backend)
        rows = Engine(model_path=settings.model_path).cluster_projection(lecture["content"], params)
    except Exception as exc:
        raise to_api_error(exc) from None
    return rows, _plot_csv(rows).rstrip("\n")


def run_cli(argv=None, stdout=None, stderr=None, env=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None or (args.command in ("lecture", "summary") and args.action is None):
            raise UsageError(parser.format_help())
        if args.command == "serve":
            from .api import serve

            overrides = {"host": args.host, "port": args.port}
            if args.storage:
                overrides["storage_path"] = args.storage
            if args.model:
                overrides["model_path"] = args.model
            serve(Settings.load().with_values(**overrides))
            return 0
        config = resolve_config(args, env)
    except UsageError as exc:
        print(str(exc).rstrip("\n"), file=stderr)
        return 1

    client = None
    try:
        if config.mode == "remote":
            client = RemoteClient(config.endpoint)
            local_settings = None
        else:
            client = LocalClient(config.storage_path, args.model)
            local_settings = client.settings
        doc, text = _execute(args, client, local_settings)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return 1
    except ApiError as exc:
        print(f"error [{exc.status} {exc.code}]: {exc.message}", file=stderr)
        return 2
    except LecternError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    finally:
        if client is not None:
            client.close()

    if config.output == "json":
        print(json.dumps(doc, indent=2, ensure_ascii=False), file=stdout)
    elif text:
        print(text, file=stdout)
    return 0


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
