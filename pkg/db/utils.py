import hashlib
import json
import logging
from typing import Optional

import config
from db.database import cache_enabled, fetch_record, store_record
from records import CacheRecord, GroupSpec

logger = logging.getLogger(__name__)


def cache_key(kind: str, group: GroupSpec, p: int, module_id: str, extent: tuple, seed: int) -> str:
    """
    Content address of a computation.

    The group enters through its generators only, so renaming a group file
    does not invalidate its entries.
    """
    material = json.dumps(
        {
            "kind": kind,
            "degree": group.degree,
            "generators": group.generators,
            "p": p,
            "module": module_id,
            "extent": list(extent),
            "seed": seed,
            "version": config.CODE_VERSION,
        },
        sort_keys=True,
    )
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def cache_get(key: str, kind: str) -> Optional[CacheRecord]:
    """Cached record, or None on a miss, stale version or disabled cache"""
    if not cache_enabled():
        return None
    row = fetch_record(key)
    if row is None:
        logger.debug(f"cache miss {kind} {key[:12]}")
        return None
    if row.version != config.CODE_VERSION or row.kind != kind:
        logger.info(f"⚠️ Ignoring stale cache entry {key[:12]} ({row.kind}, {row.version})")
        return None
    logger.debug(f"cache hit {kind} {key[:12]}")
    return CacheRecord(key=row.key, version=row.version, kind=row.kind, payload=row.payload)


def cache_put(key: str, kind: str, payload: str):
    if not cache_enabled():
        return
    store_record(key, config.CODE_VERSION, kind, payload)
