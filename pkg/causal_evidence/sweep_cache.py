"""Disk-based caching of sweep grid points."""

import hashlib
import json
from datetime import datetime
from pathlib import Path
from typing import Any

import structlog
from pydantic import ValidationError

from .models import RejectionRow

logger = structlog.get_logger(__name__)


class SweepCache:
    """One JSON file per grid point, keyed by everything that determines its tally.

    Sweeps are deterministic in their key, so entries never expire.
    """

    def __init__(self, cache_dir: str | Path = ".cache"):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _get_cache_key(self, key_data: dict[str, Any]) -> str:
        cache_str = json.dumps(key_data, sort_keys=True)
        return hashlib.md5(cache_str.encode()).hexdigest()

    def _get_cache_path(self, cache_key: str) -> Path:
        return self.cache_dir / f"{cache_key}.json"

    def _get_metadata_path(self, cache_key: str) -> Path:
        return self.cache_dir / f"{cache_key}.meta.json"

    def get_row(self, key_data: dict[str, Any]) -> RejectionRow | None:
        """Cached row for ``key_data``; unreadable entries count as misses."""
        cache_key = self._get_cache_key(key_data)
        cache_path = self._get_cache_path(cache_key)
        meta_path = self._get_metadata_path(cache_key)

        if not cache_path.exists() or not meta_path.exists():
            logger.debug("cache miss", key=cache_key)
            return None

        try:
            with open(cache_path) as f:
                row = RejectionRow.model_validate(json.load(f))
        except (json.JSONDecodeError, ValidationError, OSError):
            logger.warning("corrupt cache entry", path=str(cache_path))
            return None
        logger.debug("cache hit", key=cache_key, scenario=row.scenario, n=row.n)
        return row

    def cache_row(self, key_data: dict[str, Any], row: RejectionRow) -> None:
        cache_key = self._get_cache_key(key_data)

        with open(self._get_cache_path(cache_key), "w") as f:
            json.dump(row.model_dump(mode="json"), f, indent=2)

        metadata = {
            "cached_at": datetime.now().isoformat(),
            "scenario": row.scenario,
            "n": row.n,
            "beta": row.beta,
            "reps": row.reps,
        }
        with open(self._get_metadata_path(cache_key), "w") as f:
            json.dump(metadata, f, indent=2)

    def clear_cache(self, key_data: dict[str, Any] | None = None) -> None:
        if key_data is not None:
            cache_key = self._get_cache_key(key_data)
            self._get_cache_path(cache_key).unlink(missing_ok=True)
            self._get_metadata_path(cache_key).unlink(missing_ok=True)
        else:
            for cache_file in self.cache_dir.glob("*.json"):
                cache_file.unlink()

    def get_cache_info(self) -> dict[str, Any]:
        cache_info: dict[str, Any] = {
            "cache_dir": str(self.cache_dir),
            "total_files": len(list(self.cache_dir.glob("*.json"))),
            "cached_points": [],
        }

        for meta_file in sorted(self.cache_dir.glob("*.meta.json")):
            try:
                with open(meta_file) as f:
                    metadata = json.load(f)
                cache_info["cached_points"].append(
                    {
                        "scenario": metadata.get("scenario", "unknown"),
                        "n": metadata.get("n"),
                        "beta": metadata.get("beta"),
                        "reps": metadata.get("reps", 0),
                        "cached_at": metadata.get("cached_at"),
                    }
                )
            except (json.JSONDecodeError, KeyError):
                continue

        return cache_info
