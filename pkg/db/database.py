from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
import logging

from sqlalchemy import Column, DateTime, MetaData, String, Table, Text, create_engine, select
from sqlalchemy.dialects.sqlite import insert as sqlite_insert

logger = logging.getLogger(__name__)

CACHE_FILE = "squeeze-cache.sqlite3"

metadata = MetaData()

cache_records = Table(
    "cache_records",
    metadata,
    Column("key", String(64), primary_key=True),
    Column("version", String(32), nullable=False),
    Column("kind", String(32), nullable=False),
    Column("payload", Text, nullable=False),
    Column("created_at", DateTime, nullable=False),
)

# Global engine; None means caching is off
engine = None


def init_cache(cache_dir: str | Path):
    """Open (and create if needed) the sqlite cache in cache_dir"""
    global engine
    path = Path(cache_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        engine = create_engine(f"sqlite:///{path / CACHE_FILE}")
        metadata.create_all(engine)
        logger.info(f"✅ Cache initialized at {path / CACHE_FILE}")
    except Exception as e:
        logger.error(f"❌ Failed to initialize cache: {e}")
        engine = None
        raise


def close_cache():
    """Dispose of the cache engine"""
    global engine
    if engine is not None:
        engine.dispose()
        engine = None
        logger.info("Cache closed")


def cache_enabled() -> bool:
    return engine is not None


@contextmanager
def get_cache_connection():
    """Transactional connection to the cache"""
    if engine is None:
        raise RuntimeError("Cache not initialized")
    with engine.begin() as conn:
        yield conn


def fetch_record(key: str):
    """Row for key, or None"""
    with get_cache_connection() as conn:
        return conn.execute(select(cache_records).where(cache_records.c.key == key)).first()


def store_record(key: str, version: str, kind: str, payload: str):
    stmt = sqlite_insert(cache_records).values(
        key=key, version=version, kind=kind, payload=payload,
        created_at=datetime.now(timezone.utc).replace(tzinfo=None),
    )
    stmt = stmt.on_conflict_do_update(
        index_elements=["key"],
        set_={"version": version, "kind": kind, "payload": payload, "created_at": stmt.excluded.created_at},
    )
    with get_cache_connection() as conn:
        conn.execute(stmt)
