"""Logarithmic-mean bounds: command line entry point."""
import click
from cli import cli


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--reload", is_flag=True, help="Restart on code changes (development).")
def serve(host: str, port: int, reload: bool):
    """Serves the HTTP API under uvicorn."""
    import uvicorn

    click.echo(f"Serving on http://{host}:{port}")
    uvicorn.run("api:app", host=host, port=port, reload=reload)


if __name__ == "__main__":
    cli()
