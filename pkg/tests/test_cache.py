import pytest

import config
from db.database import cache_enabled, close_cache, init_cache
from db.utils import cache_get, cache_key, cache_put
from records import GroupSpec

SPEC = GroupSpec(name="S3", degree=3, generators=[[1, 0, 2], [1, 2, 0]])


@pytest.fixture
def cache(tmp_path):
    init_cache(tmp_path)
    yield tmp_path
    close_cache()


def test_key_ignores_group_name():
    renamed = SPEC.model_copy(update={"name": "Sym3"})
    assert cache_key("tate", SPEC, 3, "k", (-4, 4), 0) == cache_key("tate", renamed, 3, "k", (-4, 4), 0)
    assert cache_key("tate", SPEC, 3, "k", (-4, 4), 0) != cache_key("tate", SPEC, 3, "k", (-4, 4), 1)
    assert cache_key("tate", SPEC, 3, "k", (-4, 4), 0) != cache_key("tate", SPEC, 2, "k", (-4, 4), 0)


def test_disabled_cache_misses():
    assert not cache_enabled()
    cache_put("abc", "tate", "{}")
    assert cache_get("abc", "tate") is None


def test_put_and_get(cache):
    key = cache_key("loops", SPEC, 3, "k", (5,), 0)
    assert cache_get(key, "loops") is None
    cache_put(key, "loops", '{"x": 1}')
    cache_put(key, "loops", '{"x": 2}')
    hit = cache_get(key, "loops")
    assert hit.payload == '{"x": 2}'
    assert hit.version == config.CODE_VERSION
    assert (cache / "squeeze-cache.sqlite3").exists()


def test_stale_version_is_a_miss(cache, monkeypatch):
    key = cache_key("loops", SPEC, 3, "k", (5,), 0)
    cache_put(key, "loops", "{}")
    monkeypatch.setattr(config, "CODE_VERSION", "squeeze-0.9")
    assert cache_get(key, "loops") is None


def test_kind_mismatch_is_a_miss(cache):
    cache_put("shared", "loops", "{}")
    assert cache_get("shared", "tate") is None
