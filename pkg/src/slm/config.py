"""Worker-pool configuration for parallel split evaluation.

A single persistent thread pool is shared by all candidate evaluations.
Threads are enough because the split kernels release the GIL; sharing the
read-only feature arrays between workers costs nothing.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor

try:
    import psutil
except ImportError:  # pragma: no cover - psutil is a declared dependency
    psutil = None

_lock = threading.Lock()
_num_workers: int | None = None
_pool: ThreadPoolExecutor | None = None
_pool_size = 0


def physical_core_count() -> int:
    """Number of physical cores, falling back to logical ones."""
    if psutil is not None:
        n = psutil.cpu_count(logical=False)
        if n:
            return n
    return os.cpu_count() or 1


def get_num_workers() -> int:
    """Current default worker count (physical cores unless overridden)."""
    with _lock:
        if _num_workers is not None:
            return _num_workers
    return physical_core_count()


def set_num_workers(n: int | None) -> None:
    """Override the default worker count; None restores the core count."""
    global _num_workers
    if n is not None and n < 1:
        raise ValueError(f"worker count must be >= 1, got {n}")
    with _lock:
        _num_workers = n


def get_pool(size: int) -> ThreadPoolExecutor:
    """Shared executor with at least `size` threads, rebuilt on growth."""
    global _pool, _pool_size
    if size < 1:
        raise ValueError(f"pool size must be >= 1, got {size}")
    with _lock:
        if _pool is None or _pool_size < size:
            if _pool is not None:
                _pool.shutdown(wait=True)
            _pool = ThreadPoolExecutor(max_workers=size)
            _pool_size = size
        return _pool
