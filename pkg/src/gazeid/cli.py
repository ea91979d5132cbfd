"""Command-line interface.

Every flag can also be set through an environment variable with prefix
GAZEID_ (e.g. GAZEID_SERVE_PORT for `gazeid serve --port`).
"""

from __future__ import annotations

import json
import sys

import click

from . import convops


@click.group(context_settings={"auto_envvar_prefix": "GAZEID"})
def main():
    """Eye-movement biometric verification toolkit."""


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--threshold", default=0.8, show_default=True)
@click.option("--aggregation", default="max", type=click.Choice(["max", "mean"]))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(model_path, store_path, threshold, aggregation, host, port):
    """Run the enrollment/verification HTTP service."""
    import uvicorn

    from .network import load_checkpoint
    from .pipeline import DecisionPolicy
    from .service import create_app
    from .store import TemplateStore

    params = load_checkpoint(model_path)
    store = TemplateStore(store_path, model_id=params.model_id)
    app = create_app(params, store, DecisionPolicy(threshold, aggregation))
    click.echo(f"model {params.model_id} ({convops.BACKEND_NAME} conv backend)")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def _post(url, payload):
    import requests

    resp = requests.post(url, json=payload, timeout=30)
    try:
        body = resp.json()
    except ValueError:
        body = {"error": resp.text}
    return resp.status_code, body


@main.command()
@click.option("--name", required=True)
@click.option("--recording", "recording_path", required=True, type=click.Path(exists=True))
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
def enroll(name, recording_path, url):
    """Enroll a recording file for a user via the service API."""
    with open(recording_path, "r", encoding="utf-8") as f:
        rec = json.load(f)
    status, body = _post(f"{url}/api/enroll", {"name": name, "recording": rec})
    click.echo(json.dumps(body, indent=2))
    if status >= 400:
        sys.exit(1)


@main.command()
@click.option("--name", required=True)
@click.option("--recording", "recording_path", required=True, type=click.Path(exists=True))
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
def verify(name, recording_path, url):
    """Verify a recording file against a claimed user via the API."""
    with open(recording_path, "r", encoding="utf-8") as f:
        rec = json.load(f)
    status, body = _post(f"{url}/api/verify", {"name": name, "recording": rec})
    click.echo(json.dumps(body, indent=2))
    if status >= 400:
        sys.exit(1)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output_path", required=True, type=click.Path())
@click.option("--target-rate", default=125.0, show_default=True)
@click.option(
    "--mode",
    default="auto",
    type=click.Choice(["auto", "decimate", "resample"]),
    show_default=True,
)
def degrade(input_path, output_path, target_rate, mode):
    """Reduce a recording's sampling rate (decimation or resampling)."""
    from .errors import DecimationRatioError
    from .signal import decimate, load_recording, resample_linear, save_recording

    rec = load_recording(input_path)
    if mode == "decimate":
        out = decimate(rec, target_rate)
    elif mode == "resample":
        out = resample_linear(rec, target_rate)
    else:
        try:
            out = decimate(rec, target_rate)
        except DecimationRatioError:
            out = resample_linear(rec, target_rate)
    save_recording(out, output_path)
    click.echo(f"{len(rec.samples)}@{rec.rate_hz} Hz -> {len(out.samples)}@{out.rate_hz} Hz")


@main.command()
@click.option("--users", default=20, show_default=True)
@click.option("--sessions", default=4, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--rate", default=125.0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def synth(users, sessions, seed, rate, out_dir):
    """Generate a synthetic labeled corpus plus manifest."""
    from .synth import make_population, write_corpus

    corpus = make_population(users, sessions, seed, rate_hz=rate)
    manifest = write_corpus(corpus, out_dir)
    click.echo(f"wrote {len(corpus)} recordings; manifest at {manifest}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--epochs", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--noise-std", default=0.1, show_default=True)
@click.option("--fold-index", default=0, show_default=True)
def train(manifest_path, out_path, epochs, seed, noise_std, fold_index):
    """Train the embedding model on a corpus manifest."""
    from .network import NetworkConfig, save_checkpoint
    from .signal import DegradationConfig, load_recording, to_velocity
    from .synth import load_manifest
    from .training import TrainConfig
    from .training import train as run_training

    entries = load_manifest(manifest_path)
    corpus = [(e["user"], to_velocity(load_recording(e["path"]))) for e in entries]
    cfg = TrainConfig(
        epochs=epochs,
        fold_index=fold_index,
        degradation=DegradationConfig(noise_std=noise_std, seed=seed),
    )
    params, log = run_training(corpus, NetworkConfig(), cfg, seed)
    save_checkpoint(params, out_path)
    last = log[-1]
    click.echo(
        f"model {params.model_id} after {len(log)} epochs; "
        f"final train loss {last['train_loss']:.4f}"
        + (f", val loss {last['val_loss']:.4f}" if "val_loss" in last else "")
    )


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True))
@click.option("--manifest", "manifest_path", type=click.Path(exists=True))
@click.option("--model", "model_path", type=click.Path(exists=True))
@click.option("--enroll-session", default=1, show_default=True)
@click.option("--verify-session", default=2, show_default=True)
@click.option("--threshold", default=0.8, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="machine-readable output only")
def evaluate(matrix_path, manifest_path, model_path, enroll_session, verify_session, threshold, as_json):
    """Score-matrix evaluation: FAR/FRR curves and equal error rate."""
    from .evaluation import compute_eer, parse_score_table, render_table
    from .evaluation import end_to_end_eval

    if matrix_path:
        with open(matrix_path, "r", encoding="utf-8") as f:
            matrix = parse_score_table(f.read())
        report = compute_eer(matrix, operating_threshold=threshold)
    elif manifest_path and model_path:
        from .network import load_checkpoint
        from .synth import load_manifest

        params = load_checkpoint(model_path)
        report, matrix = end_to_end_eval(
            load_manifest(manifest_path),
            params,
            enroll_session,
            verify_session,
            operating_threshold=threshold,
        )
    else:
        raise click.UsageError("provide --matrix, or --manifest with --model")

    if not as_json:
        click.echo(render_table(matrix))
        click.echo(
            f"\nEER {float(report.eer):.4f} at threshold {report.eer_threshold:.4f} "
            f"({report.convention}); at {threshold}: "
            f"FAR {report.far_at} / FRR {report.frr_at}"
        )
    click.echo(json.dumps(report.to_dict()))


if __name__ == "__main__":
    main()
