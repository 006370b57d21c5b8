"""Small shared utilities."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker count from CAUSALKIT_THREADS (default 1 = run inline)."""
    try:
        return max(1, int(os.environ.get("CAUSALKIT_THREADS", "1")))
    except ValueError:
        return 1


def thread_map(funcs):
    """Run zero-argument callables, in a small pool when threads are enabled."""
    n = thread_count()
    if n <= 1 or len(funcs) <= 1:
        return [f() for f in funcs]
    with ThreadPoolExecutor(max_workers=min(n, len(funcs))) as pool:
        futures = [pool.submit(f) for f in funcs]
        return [f.result() for f in futures]
