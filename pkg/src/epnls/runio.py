"""Small IO utilities: 17-digit float formatting, atomic writes, run
manifests, and output-directory locking."""

from __future__ import annotations

import hashlib
import json
import os
import time


def fmt(x):
    """Format a float with 17 significant digits (lossless roundtrip)."""
    return f"{float(x):.17g}"


def atomic_write_text(path, text):
    """Write-then-rename so concurrent readers never see partial files."""
    path = str(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def sha256_hex(text):
    return hashlib.sha256(text.encode()).hexdigest()


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_curve_csv(path):
    """Parse a two-column (t, rho) CSV written by write_csv."""
    times, rho = [], []
    with open(path) as fh:
        next(fh)  # header
        for line in fh:
            a, b = line.strip().split(",")
            times.append(float(a))
            rho.append(float(b))
    return times, rho


class OutputLock:
    """Exclusive ownership of an output directory via an O_EXCL lockfile."""

    def __init__(self, outdir):
        self.path = os.path.join(str(outdir), ".lock")
        self._fd = None

    def __enter__(self):
        os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise RuntimeError(
                f"output directory is locked by another run ({self.path}); "
                "remove the lockfile if that run is dead"
            ) from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc):
        if self._fd is not None:
            os.close(self._fd)
            os.remove(self.path)
        return False


class ManifestBuilder:
    """Collects job statuses and the output-file inventory for a run."""

    def __init__(self, outdir, config_hash, tool_version):
        self.outdir = str(outdir)
        self.config_hash = config_hash
        self.tool_version = tool_version
        self.started_at = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        self.jobs = []

    def add_job(self, name, status, detail=""):
        self.jobs.append({"name": name, "status": status, "detail": detail})

    def write(self):
        """Write manifest.json listing every file under the output directory
        (the manifest itself and the lockfile excluded)."""
        inventory = []
        for root, _dirs, files in os.walk(self.outdir):
            for name in sorted(files):
                full = os.path.join(root, name)
                rel = os.path.relpath(full, self.outdir)
                if rel in ("manifest.json", ".lock") or full.endswith(".tmp"):
                    continue
                inventory.append({"path": rel, "bytes": os.path.getsize(full)})
        inventory.sort(key=lambda e: e["path"])
        doc = {
            "config_hash": self.config_hash,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "jobs": self.jobs,
            "files": inventory,
        }
        atomic_write_text(
            os.path.join(self.outdir, "manifest.json"), json.dumps(doc, indent=2)
        )
        return doc
