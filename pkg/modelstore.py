#!/usr/bin/env python3
"""
Fanocheck - Model Store
Content-addressed loading of shipped model files
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from exactkernel import InputError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "MANIFEST.json"


def file_digest(path: Path) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            sha.update(chunk)
    return sha.hexdigest()


class ModelStore:
    """Model directory with a MANIFEST.json of sha256 digests

    Files missing from the manifest are refused unless the store is unchecked.
    """

    def __init__(self, directory: Union[str, Path] = "models", unchecked: bool = False):
        self.directory = Path(directory)
        self.unchecked = unchecked
        self.manifest = self.load_manifest()
        # digests of every file handed out, for certificates
        self.used: Dict[str, str] = {}

    def load_manifest(self) -> Dict[str, str]:
        path = self.directory / MANIFEST_NAME
        if not path.exists():
            if not self.unchecked:
                logger.warning(f"No manifest found at {path}")
            return {}
        try:
            with open(path, "r") as f:
                data = json.load(f)
            return dict(data.get("models", {}))
        except Exception as e:
            raise InputError(f"malformed manifest {path}: {e}")

    def path(self, name: str) -> Path:
        candidate = self.directory / name
        if not candidate.suffix:
            candidate = candidate.with_suffix(".json")
        return candidate

    def resolve(self, name: str) -> Dict[str, Any]:
        """Load a model file by name, checking its digest against the manifest"""
        path = self.path(name)
        if not path.exists():
            raise InputError(f"model file {path} not found")
        digest = file_digest(path)
        expected: Optional[str] = self.manifest.get(path.name)
        if expected is None:
            if not self.unchecked:
                raise InputError(f"model {path.name} is not listed in {MANIFEST_NAME}; use --unchecked to load it")
            logger.warning(f"Loading unhashed model {path.name}")
        elif expected != digest:
            if not self.unchecked:
                raise InputError(f"model {path.name} does not match its manifest digest")
            logger.warning(f"Digest mismatch for {path.name} ignored (--unchecked)")
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"malformed model file {path.name}: {e}")
        self.used[path.name] = digest
        logger.debug(f"Loaded model {path.name} ({digest[:12]})")
        return data

    def load(self, ref: str) -> Dict[str, Any]:
        """A shipped model by name, or an external JSON file by path"""
        candidate = Path(ref)
        if not (candidate.is_file() and candidate.resolve().parent != self.directory.resolve()):
            return self.resolve(candidate.name if candidate.is_file() else ref)
        if not self.unchecked:
            raise InputError(f"external model {ref} has no manifest entry; use --unchecked to load it")
        logger.warning(f"Loading external model {ref}")
        try:
            with open(candidate, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"malformed model file {ref}: {e}")
        self.used[str(candidate)] = file_digest(candidate)
        return data

    def names(self, prefix: str = "") -> list:
        return sorted(p.stem for p in self.directory.glob(f"{prefix}*.json") if p.name != MANIFEST_NAME)
