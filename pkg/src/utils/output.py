# Copyright (c) 2025 Bytedance Ltd. and/or its affiliates
# SPDX-License-Identifier: MIT

import hashlib
import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from .exceptions import OutputConflictError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
META_SUFFIX = ".meta.json"


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(payload: Any, indent: Optional[int] = 2) -> str:
    """Serialize to JSON with numpy and pydantic values converted."""
    return json.dumps(payload, indent=indent, sort_keys=True, default=_to_jsonable)


def stable_hash(payload: Any) -> str:
    """Short SHA-256 of the canonical JSON form of ``payload``."""
    text = json.dumps(payload, sort_keys=True, default=_to_jsonable)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + META_SUFFIX)


class OutputWriter:
    """Writes run artifacts with a metadata sidecar and an overwrite guard.

    Every file ``name`` gets ``name.meta.json`` holding the config hash. An
    existing file whose sidecar hash differs (or that has no sidecar) is only
    replaced when ``force`` is set.
    """

    def __init__(self, directory: str | Path, config_hash: str, force: bool = False):
        self.directory = Path(directory)
        self.config_hash = config_hash
        self.force = force
        self.written: List[Path] = []
        self._lock = threading.Lock()

    def _guard(self, path: Path) -> None:
        if not path.exists() or self.force:
            return
        meta = sidecar_path(path)
        previous = None
        if meta.exists():
            try:
                previous = json.loads(meta.read_text()).get("config_hash")
            except json.JSONDecodeError:
                logger.warning(f"Unreadable sidecar {meta}")
        if previous != self.config_hash:
            raise OutputConflictError(
                f"Refusing to overwrite {path}: produced by config {previous}, "
                f"current config {self.config_hash} (use --force)"
            )

    def _finish(self, path: Path, metadata: Optional[Dict[str, Any]]) -> Path:
        record = {"config_hash": self.config_hash, "file": path.name}
        record.update(metadata or {})
        sidecar_path(path).write_text(dumps(record) + "\n")
        self.written.append(path)
        logger.info(f"Wrote {path}")
        return path

    def _prepare(self, name: str) -> Path:
        path = self.directory / name
        self._guard(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_frame(
        self, name: str, frame: pd.DataFrame, metadata: Optional[Dict[str, Any]] = None
    ) -> Path:
        with self._lock:
            path = self._prepare(name)
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            return self._finish(path, metadata)

    def write_json(
        self, name: str, payload: Any, metadata: Optional[Dict[str, Any]] = None
    ) -> Path:
        with self._lock:
            path = self._prepare(name)
            path.write_text(dumps(payload) + "\n")
            return self._finish(path, metadata)

    def write_jsonl(
        self,
        name: str,
        records: Iterable[Dict[str, Any]],
        metadata: Optional[Dict[str, Any]] = None,
    ) -> Path:
        with self._lock:
            path = self._prepare(name)
            lines = [dumps(record, indent=None) for record in records]
            path.write_text("".join(line + "\n" for line in lines))
            return self._finish(path, metadata)
