"""
Run manifests written next to every output file.

Primary outputs never contain timestamps; the manifest does.
"""
import hashlib
import json
import logging
from contextvars import ContextVar
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from django.conf import settings

logger = logging.getLogger(__name__)

# argv of the spf-lab invocation being served, set by core.cli.dispatch
current_invocation = ContextVar('current_invocation', default=None)


@dataclass(frozen=True)
class RunManifest:
    command_line: str
    input_hash: str
    seed: Optional[int]
    tool_version: str
    timestamp: str


def hash_bytes(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def hash_input(input_path=None, fallback: str = '') -> str:
    """SHA-256 of the input file, or of a canonical description when there is none."""
    if input_path:
        return hash_bytes(Path(input_path).read_bytes())
    return hash_bytes(fallback.encode('utf-8'))


def build_manifest(argv, input_path=None, seed=None, fallback: str = '') -> RunManifest:
    return RunManifest(
        command_line=' '.join(str(a) for a in argv),
        input_hash=hash_input(input_path, fallback),
        seed=seed,
        tool_version=settings.SPFLAB_VERSION,
        timestamp=datetime.now(timezone.utc).isoformat(timespec='seconds'),
    )


def manifest_path(output_path) -> Path:
    output_path = Path(output_path)
    return output_path.with_name(output_path.name + '.manifest.json')


def write_output(output_path, text: str, manifest: RunManifest) -> Path:
    """Write a primary output file and its manifest; returns the manifest path."""
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(text, encoding='utf-8')
    target = manifest_path(output_path)
    target.write_text(json.dumps(asdict(manifest), indent=2) + '\n', encoding='utf-8')
    logger.info(f"Wrote {output_path} with manifest {target}")
    return target
