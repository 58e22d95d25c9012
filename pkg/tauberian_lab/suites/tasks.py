"""
Thread-pool execution of independent series and checks
"""
import logging
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Mapping, NamedTuple, Optional, Sequence

logger = logging.getLogger(__name__)


class SuiteTask(NamedTuple):
    name: str
    func: Callable[..., Any]
    args: tuple = ()
    kwargs: Optional[Mapping[str, Any]] = None


def run_task(task: SuiteTask) -> Any:
    """
    Run one task, logging its duration; failures are logged in full and re-raised
    """
    started = time.perf_counter()
    try:
        logger.debug(f"Starting task {task.name}")
        result = task.func(*task.args, **(task.kwargs or {}))
        logger.info(f"Task {task.name} completed in {time.perf_counter() - started:.2f}s")
        return result

    except Exception as exc:
        error_details = traceback.format_exc()

        logger.error(f"""
        ==================== Task Failure Details ====================
        Task Name: {task.name}
        Function: {getattr(task.func, '__qualname__', repr(task.func))}
        Arguments: {len(task.args)} positional, {sorted(task.kwargs or {})}
        Error Type: {type(exc).__name__}
        Error Message: {str(exc)}
        Elapsed: {time.perf_counter() - started:.2f}s

        Stack Trace:
        {error_details}
        ==================== End of Failure Details ===================
        """)
        raise


def run_tasks(tasks: Sequence[SuiteTask], workers: int = 1) -> List[Any]:
    """Results in task order; the first failure propagates once all tasks are submitted"""
    if workers <= 1 or len(tasks) <= 1:
        return [run_task(task) for task in tasks]

    with ThreadPoolExecutor(max_workers=min(workers, len(tasks)), thread_name_prefix='tlab') as pool:
        return list(pool.map(run_task, tasks))
