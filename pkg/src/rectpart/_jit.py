"""Numba switch.

Setting ``RECTPART_DISABLE_NUMBA=1`` turns every kernel decorated with
:func:`njit` into the plain Python function over numpy arrays. Results are
identical on both paths; only speed differs.
"""
import contextlib
import functools
import importlib.util
import os

DISABLE_ENV = "RECTPART_DISABLE_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


NUMBA_ENABLED = False
if not _env_disabled():
    try:
        import numba

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        pass


_force_pure = False


def njit(*args, **kwargs):
    if NUMBA_ENABLED and not _force_pure:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrapper(func):
        return func

    return wrapper


@contextlib.contextmanager
def _pure():
    global _force_pure
    _force_pure = True
    try:
        yield
    finally:
        _force_pure = False


@functools.lru_cache(maxsize=None)
def pure_kernels():
    """A second, never-compiled copy of the kernels module.

    Its functions call each other as plain Python, so they accept object
    arrays of unbounded ints where the compiled int64 path could overflow.
    """
    from . import kernels
    spec = importlib.util.spec_from_file_location(kernels.__name__ + "_pure", kernels.__file__)
    mod = importlib.util.module_from_spec(spec)
    mod.__package__ = kernels.__package__
    with _pure():
        spec.loader.exec_module(mod)
    return mod
