#!/usr/bin/env python3

import json
import os
import threading
import time

# Global cache for HTTP experiment results, keyed by canonical request JSON
_result_cache = {}
_cache_timestamps = {}
_cache_lock = threading.Lock()
_active_requests = {}  # Track running computations to prevent duplicates
RESULT_CACHE_TTL = int(os.getenv('RISAMP_CACHE_TTL', '600'))
WAIT_TIMEOUT = 300


def make_cache_key(kind, payload):
    """Canonical key: request kind plus the payload as sorted compact JSON"""
    return f"{kind}:{json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)}"


def _fresh(cache_key):
    if cache_key in _result_cache and cache_key in _cache_timestamps:
        age = time.time() - _cache_timestamps[cache_key]
        if age < RESULT_CACHE_TTL:
            return True, age
    return False, 0.0


def _evict_expired():
    """Drop entries older than the TTL; caller holds _cache_lock"""
    now = time.time()
    expired = [key for key, ts in _cache_timestamps.items() if now - ts >= RESULT_CACHE_TTL]
    for key in expired:
        _result_cache.pop(key, None)
        _cache_timestamps.pop(key, None)
    if expired:
        print(f"🧹 Evicted {len(expired)} expired results from cache")


def get_or_compute(cache_key, compute):
    """
    Return the cached result for cache_key or run compute() once.

    Thread-safe: a second request for a key that is already running waits for
    the first one instead of starting its own computation.
    """
    # Fast path without the lock
    fresh, age = _fresh(cache_key)
    if fresh:
        print(f"✅ Using cached result (age: {age:.1f}s)")
        return _result_cache[cache_key], True

    with _cache_lock:
        fresh, age = _fresh(cache_key)
        if fresh:
            print(f"✅ Using cached result (age: {age:.1f}s)")
            return _result_cache[cache_key], True
        waiting = cache_key in _active_requests
        if not waiting:
            _active_requests[cache_key] = threading.current_thread().ident

    if waiting:
        print("⏳ Same experiment already running in another request, waiting...")
        deadline = time.time() + WAIT_TIMEOUT
        while time.time() < deadline:
            time.sleep(0.2)
            fresh, age = _fresh(cache_key)
            if fresh:
                print(f"✅ Using result computed by another request (age: {age:.1f}s)")
                return _result_cache[cache_key], True
            if cache_key not in _active_requests:
                break
        print("⚠️ Other request did not produce a result, computing it here")
        with _cache_lock:
            _active_requests[cache_key] = threading.current_thread().ident

    try:
        result = compute()
        with _cache_lock:
            _evict_expired()
            _result_cache[cache_key] = result
            _cache_timestamps[cache_key] = time.time()
        return result, False
    finally:
        with _cache_lock:
            _active_requests.pop(cache_key, None)


def clear_result_cache():
    """Clear the result cache"""
    with _cache_lock:
        cleared_count = len(_result_cache)
        _result_cache.clear()
        _cache_timestamps.clear()
    print(f"🧹 Cleared {cleared_count} items from result cache")
    return cleared_count


def get_result_cache_stats():
    """Get result cache statistics"""
    now = time.time()
    ages = [now - ts for ts in _cache_timestamps.values()]
    return {
        'cached_results': len(_result_cache),
        'active_requests': len(_active_requests),
        'cache_ttl_seconds': RESULT_CACHE_TTL,
        'oldest_entry_age': max(ages) if ages else 0,
    }
