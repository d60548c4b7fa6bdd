# Python imports
import logging
from collections.abc import Iterable
from typing import Callable, TypeVar

# 3rd party imports
import fsspec  # type: ignore
from fsspec import AbstractFileSystem  # type: ignore

# TODO find stubs for joblib and remove "type: ignore"
from joblib import Parallel, delayed  # type: ignore

T = TypeVar("T")
U = TypeVar("U")

logger = logging.getLogger(__name__)


def parallel_map(f: Callable[[T], U], items: Iterable[T], num_jobs: int) -> list[U]:
    """
    Similar to Python's `map`, but spreads the calls over a thread pool.

    Results come back in the order of ``items`` whatever the number of jobs.

    :param f: the function to call.
    :param items: the iterable to map over.
    :param num_jobs: the number of threads; 1 runs the calls inline.
    :returns: the list of results.
    """
    assert num_jobs >= 1
    work = list(items)
    if num_jobs == 1 or len(work) <= 1:
        return [f(x) for x in work]
    return Parallel(n_jobs=num_jobs, backend="threading")(  # type: ignore
        delayed(f)(x) for x in work  # type: ignore
    )


def get_fs(path: str) -> AbstractFileSystem:
    """
    Choose the fsspec filesystem for an algebra document or a DOT output path.

    A ``protocol://`` prefix selects that protocol (``s3``, ``memory``, ...); a bare
    path is on the local disk.

    :param path: the algebra document or output path

    :returns: the filesystem holding ``path``.
    """
    protocol, sep, _ = path.partition("://")
    return fsspec.filesystem(protocol if sep else "local")  # type: ignore


def read_text(document_path: str) -> str:
    """
    Read a UTF-8 text document from any filesystem fsspec understands.

    :param document_path: the path to the document

    :returns: the document text.
    """
    fs = get_fs(document_path)
    with fs.open(document_path, "rb") as f:  # type: ignore
        val = f.read()  # type: ignore
    if not isinstance(val, bytes):
        raise TypeError(f"Expected bytes, got {type(val)}")  # type: ignore
    return val.decode("utf-8")


def write_text(document_path: str, text: str) -> None:
    """
    Write a UTF-8 text document to any filesystem fsspec understands.

    :param document_path: the path to the document
    :param text: the text to write.
    """
    fs = get_fs(document_path)
    with fs.open(document_path, "wb") as f:  # type: ignore
        f.write(text.encode("utf-8"))  # type: ignore
