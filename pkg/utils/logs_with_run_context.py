from functools import wraps
from pathlib import Path
from typing import Callable, TypeVar, ParamSpec
import inspect

from utils.logger import logger

P = ParamSpec('P')
R = TypeVar('R')


def _run_id(kwargs: dict) -> str | None:
    for key in ('dataset', 'out'):
        if value := kwargs.get(key):
            return Path(value).name
    return None


def log_with_run_context(func: Callable[P, R]) -> Callable[P, R]:
    """Binds command name, run id and seed to every log line emitted inside `func`.

    Commands are called with keyword arguments; `dataset`/`out` name the run
    directory and `master_seed` is picked up when present.
    """
    @wraps(func)
    async def async_wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        with logger.contextualize(
            command=func.__name__,
            run_id=_run_id(kwargs),
            master_seed=kwargs.get('master_seed'),
        ):
            logger.info(f"{func.__name__} called")
            result = await func(*args, **kwargs)
            logger.info(f"{func.__name__} completed")
            return result

    @wraps(func)
    def sync_wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        with logger.contextualize(
            command=func.__name__,
            run_id=_run_id(kwargs),
            master_seed=kwargs.get('master_seed'),
        ):
            logger.info(f"{func.__name__} called")
            result = func(*args, **kwargs)
            logger.info(f"{func.__name__} completed")
            return result

    return async_wrapper if inspect.iscoroutinefunction(func) else sync_wrapper
