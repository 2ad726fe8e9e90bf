#!/usr/bin/env python3
"""
Fanocheck - Certificates
Machine-readable certificates of computed values and their saved archive
"""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dateutil import parser as date_parser

from exactkernel import format_rational

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y%m%d_%H%M%S"


@dataclass
class Certificate:
    """Model hashes, exact results, anchors and verdicts of one command"""

    command: str
    models: Dict[str, str] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    anchors: Dict[str, Any] = field(default_factory=dict)
    verdicts: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))

    def add_result(self, key: str, value: Any):
        self.results[key] = format_rational(value) if not isinstance(value, (str, dict, list, bool)) else value

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, ensure_ascii=False)

    @property
    def digest(self) -> str:
        """sha256 over everything except the timestamp"""
        body = asdict(self)
        body.pop("timestamp")
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode("utf-8")).hexdigest()

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


def save_certificate(cert: Certificate, directory: Union[str, Path] = "certificates") -> Optional[Path]:
    try:
        directory = Path(directory)
        directory.mkdir(exist_ok=True)
        stamp = datetime.now().strftime(TIMESTAMP_FORMAT)
        path = directory / f"{cert.command.replace(' ', '-')}_{stamp}.json"
        with open(path, "w", encoding="utf-8") as f:
            f.write(cert.to_json())
        logger.info(f"Certificate saved to {path}")
        return path
    except Exception as e:
        logger.error(f"Error saving certificate: {e}")
        return None


def list_certificates(directory: Union[str, Path] = "certificates") -> List[Dict[str, Any]]:
    """Saved certificates, newest first"""
    entries = []
    for path in Path(directory).glob("*.json"):
        try:
            with open(path, "r", encoding="utf-8") as f:
                cert = Certificate.from_json(f.read())
            created = date_parser.parse(cert.timestamp)
        except Exception as e:
            logger.warning(f"Skipping unreadable certificate {path.name}: {e}")
            continue
        entries.append({
            "file": path.name,
            "command": cert.command,
            "created": created,
            "digest": cert.digest,
        })
    entries.sort(key=lambda entry: entry["created"], reverse=True)
    return entries
