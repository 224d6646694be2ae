"""Canonical JSON reports, certificate files, and a content-addressed cache.

Every artifact is a stamped envelope {schema, kind, payload, sha256} where
the digest covers the canonical serialization of the first three fields.
Canonical means sorted keys, minimal separators, ASCII: two runs that agree
on content agree on bytes, which is what the determinism checks compare.
"""
from __future__ import annotations

import hashlib
import json
import os
import platform
import tempfile
from pathlib import Path

from raycap import __version__
from raycap.capsearch import CandidateCertificate, CyclicFieldDesc
from raycap.errors import InputError

SCHEMA = "rc-1"
CACHE_ENV = "RAYCAP_CACHE_DIR"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _digest(body: dict) -> str:
    return hashlib.sha256(canonical_json(body).encode("ascii")).hexdigest()


def stamp(kind: str, payload) -> dict:
    body = {"schema": SCHEMA, "kind": kind, "payload": payload}
    return {**body, "sha256": _digest(body)}


def check_stamp(report: dict) -> bool:
    try:
        body = {k: report[k] for k in ("schema", "kind", "payload")}
    except (KeyError, TypeError):
        return False
    return report.get("sha256") == _digest(body) and report["schema"] == SCHEMA


def toolchain_fingerprint() -> dict:
    return {
        "package": "raycap",
        "version": __version__,
        "python": platform.python_version(),
    }


# ---------------------------------------------------------------------------
# certificate files


def certificate_from_dict(d: dict) -> CandidateCertificate:
    try:
        cf = d["cyclic_field"]
        return CandidateCertificate(
            d=int(d["d"]),
            modulus=tuple(tuple(int(x) for x in t) for t in d["modulus"]),
            target=tuple(int(x) for x in d["target"]),
            ell=int(d["ell"]),
            n=int(d["n"]),
            h=int(d["h"]),
            h_K=int(d["h_K"]),
            p=int(d["p"]),
            root=int(d["root"]),
            eps_character=dict(d["eps_character"]),
            minus_one_character=dict(d["minus_one_character"]),
            bound=int(d["bound"]),
            cyclic_field=CyclicFieldDesc(
                p=int(cf["p"]),
                degree=int(cf["degree"]),
                min_poly=tuple(int(c) for c in cf["min_poly"]),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed certificate data: {exc}") from exc


def certificate_report(
    cert: CandidateCertificate, verification: dict | None = None
) -> dict:
    payload = {
        "certificate": cert.as_dict(),
        "verification": verification,
        "toolchain": toolchain_fingerprint(),
    }
    return stamp("certificate", payload)


def save_certificate(
    path: str | Path, cert: CandidateCertificate, verification: dict | None = None
) -> dict:
    report = certificate_report(cert, verification)
    atomic_write_text(Path(path), canonical_json(report) + "\n")
    return report


def load_certificate(path: str | Path) -> tuple[CandidateCertificate, dict]:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"no certificate file at {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"certificate file is not JSON: {exc}") from exc
    if not check_stamp(data) or data.get("kind") != "certificate":
        raise InputError("certificate file failed its integrity stamp")
    cert = certificate_from_dict(data["payload"]["certificate"])
    return cert, data


# ---------------------------------------------------------------------------
# cache


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class ReportCache:
    """Content-addressed store: key dict -> stamped report, one file each."""

    def __init__(self, root: str | Path | None = None):
        if root is None:
            root = os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "raycap"
        self.root = Path(root)

    def path_for(self, key: dict) -> Path:
        return self.root / f"{hashlib.sha256(canonical_json(key).encode()).hexdigest()}.json"

    def get(self, key: dict) -> dict | None:
        try:
            data = json.loads(self.path_for(key).read_text())
        except (FileNotFoundError, json.JSONDecodeError, OSError):
            return None
        if not check_stamp(data):
            return None  # torn or stale write: recompute
        return data

    def put(self, key: dict, report: dict) -> None:
        atomic_write_text(self.path_for(key), canonical_json(report) + "\n")
