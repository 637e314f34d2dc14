"""Command-line interface mirroring the service and the bibliography workflow.

stdout carries data, diagnostics go to stderr. Exit codes: 0 success,
1 usage error, 2 runtime error.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from typing import Optional

import click

from . import bibgen, service
from .entity_api import ApiConfig, EntityApiClient
from .errors import ScholiaError
from .model import Aspect, parse_entity_id
from .queries import PanelQuerySpec, build_panel_query, panel_catalog
from .resolver import guess_aspect, load_rules_from_env
from .sparql_client import EndpointConfig, SparqlClient

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


@click.group()
@click.option("--json-errors", is_flag=True, help="Emit machine-readable errors on stderr.")
@click.pass_context
def cli(ctx: click.Context, json_errors: bool) -> None:
    """Scholarly profiles from a Wikidata-style knowledge graph."""
    ctx.ensure_object(dict)
    ctx.obj["json_errors"] = json_errors


@cli.command("write-bib-from-aux")
@click.argument("aux_path", metavar="FILE.AUX")
@click.option("--out", "out_path", default=None, help="Output path (default: FILE.bib).")
def write_bib_from_aux_cmd(aux_path: str, out_path: Optional[str]) -> None:
    """Write a BibTeX file for the items cited in a LaTeX aux file."""
    client = EntityApiClient(ApiConfig.from_env())
    report = bibgen.write_bib_from_aux(aux_path, out_path, client)
    click.echo(f"wrote {report.written} entries", err=True)
    if report.skipped:
        click.echo(f"skipped non-item keys: {', '.join(report.skipped)}", err=True)
    for entity_text, reason in report.failures:
        click.echo(f"failed {entity_text}: {reason}", err=True)


@cli.command("query")
@click.argument("aspect_segment", metavar="ASPECT")
@click.argument("panel", metavar="PANEL")
@click.argument("id_text", metavar="QID")
@click.option(
    "--format", "fmt", type=click.Choice(["json", "csv", "query-only"]), default="json"
)
@click.option("--limit", default=500, show_default=True)
@click.option("--language", default="en", show_default=True)
def query_cmd(aspect_segment: str, panel: str, id_text: str, fmt: str, limit: int, language: str) -> None:
    """Build (and optionally run) the SPARQL query behind one panel."""
    try:
        aspect = Aspect.from_segment(aspect_segment)
    except KeyError:
        raise click.UsageError(f"unknown aspect {aspect_segment!r}")
    subject = parse_entity_id(id_text)
    spec = PanelQuerySpec(
        aspect=aspect, panel=panel, subject=subject, language=language, limit=limit
    )
    query = build_panel_query(spec)
    if fmt == "query-only":
        click.echo(query.text)
        return
    client = SparqlClient(EndpointConfig.from_env())
    results = client.execute(query)
    if fmt == "json":
        click.echo(json.dumps(results.to_sparql_json(), ensure_ascii=False, indent=2))
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerow(results.variables)
        for row in results:
            writer.writerow([row[name].value if name in row else "" for name in results.variables])
        click.echo(buffer.getvalue(), nl=False)


@cli.command("aspect")
@click.argument("id_text", metavar="QID")
def aspect_cmd(id_text: str) -> None:
    """Print the guessed aspect for a bare item id."""
    subject = parse_entity_id(id_text)
    client = SparqlClient(EndpointConfig.from_env())
    click.echo(guess_aspect(subject, client, load_rules_from_env()).value)


@cli.command("search")
@click.argument("term")
@click.option("--limit", default=10, show_default=True)
def search_cmd(term: str, limit: int) -> None:
    """Search entities; prints id, label and description per line."""
    client = EntityApiClient(ApiConfig.from_env())
    for hit in client.search_entities(term, limit):
        click.echo(f"{hit.entity.text}\t{hit.label}\t{hit.description}")


@cli.command("panels")
def panels_cmd() -> None:
    """Print the panel catalog."""
    catalog = panel_catalog()
    width = max(len(e["panel"]) for e in catalog)
    for entry in catalog:
        click.echo(
            f"{entry['aspect']:<13} {entry['panel']:<{width}} "
            f"tier-{entry['tier']} {entry['kind']:<18} {entry['description']}"
        )


@cli.command("serve")
@click.option("--bind", default=None, help="host:port (default from SCHOLIA_BIND or 127.0.0.1:8100).")
def serve_cmd(bind: Optional[str]) -> None:
    """Run the profile web service."""
    service.run(bind)


def main(argv: Optional[list] = None) -> int:
    """Dispatch argv; returns the process exit status."""
    json_errors = "--json-errors" in (argv if argv is not None else sys.argv[1:])

    def report(kind: str, message: str) -> None:
        if json_errors:
            sys.stderr.write(json.dumps({"error": {"kind": kind, "message": message}}) + "\n")
        else:
            sys.stderr.write(f"error: {message}\n")

    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return EXIT_OK
    except click.exceptions.Abort:
        report("aborted", "aborted")
        return EXIT_RUNTIME
    except click.UsageError as exc:
        report("usage", exc.format_message())
        return EXIT_USAGE
    except click.ClickException as exc:
        report("usage", exc.format_message())
        return EXIT_USAGE
    except ScholiaError as exc:
        report(type(exc).__name__, str(exc))
        return EXIT_RUNTIME
    except OSError as exc:
        report("io", str(exc))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
