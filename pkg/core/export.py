"""Data-file writers: CSV tables, lattice snapshots and config provenance.

CSV files use a comma delimiter, '.' decimals, a header row and LF line
endings, preceded by ``# `` comment lines carrying the resolved config.
Read them back with ``pandas.read_csv(path, comment="#")``.
"""

from __future__ import annotations

import logging
import tempfile
from pathlib import Path

import pandas as pd

from .engine import Snapshot
from .errors import OutputDirectoryError

logger = logging.getLogger(__name__)


def prepare_output_dir(path: str | Path) -> Path:
    """Create ``path`` and prove it is writable before any simulation starts."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=out, prefix=".probe-"):
            pass
    except OSError as e:
        raise OutputDirectoryError(f"output directory {out} is not writable: {e}") from e
    return out


def write_csv(df: pd.DataFrame, path: Path, config_json: str) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# config: {config_json}\n")
        df.to_csv(fh, index=False, lineterminator="\n")
    logger.info("wrote %s (%d rows)", path, len(df))
    return path


def write_snapshot(snapshot: Snapshot, path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(snapshot.render())
    logger.info("wrote %s", path)
    return path


def snapshot_filename(t: int) -> str:
    return f"snapshot_t{t:05d}.txt"


def write_config(config_json: str, path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(config_json + "\n")
    return path
