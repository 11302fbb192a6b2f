"""Binary coefficient cache.

Layout (all integers little-endian)::

    magic     8 bytes  b"CUSPQEXP"
    version   u16
    weight    u16
    N         u64
    form_id   u16 length + UTF-8 bytes
    flags     u16      bit 0 set for exact integer payload
    checksum  32 bytes SHA-256 of the payload

The payload holds the coefficients of q^0 .. q^N.  Float files store one
double per coefficient.  Exact files store one record per coefficient: a
u64 word count w followed by w 8-byte words of the two's-complement value.
"""

from __future__ import annotations

import fcntl
import hashlib
import os
import struct
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .errors import (CacheVersionError, ChecksumError, InsufficientCacheError,
                     TruncatedFileError)
from .qseries import QExpansion

MAGIC = b"CUSPQEXP"
VERSION = 1
FLAG_EXACT = 1
ENV_VAR = "CUSPSUM_CACHE_DIR"


def default_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else Path.home() / ".cache" / "cuspsum"


def cache_path(form_id: str, n: int, exact: bool, directory=None) -> Path:
    d = Path(directory) if directory is not None else default_dir()
    return d / f"{form_id}_{n}_{'exact' if exact else 'float'}.qexp"


@contextmanager
def _locked(path: Path, mode: int):
    lock = path.with_name(path.name + ".lock")
    lock.parent.mkdir(parents=True, exist_ok=True)
    with open(lock, "a") as fh:
        fcntl.flock(fh, mode)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _encode_int(x: int) -> bytes:
    words = x.bit_length() // 64 + 1  # room for the sign bit
    return struct.pack("<Q", words) + x.to_bytes(8 * words, "little", signed=True)


def _payload(f: QExpansion) -> bytes:
    series = f.series()
    if f.exact:
        return b"".join(_encode_int(int(x)) for x in series)
    return np.asarray(series, dtype="<f8").tobytes()


def encode(f: QExpansion) -> bytes:
    payload = _payload(f)
    name = f.form_id.encode()
    header = MAGIC + struct.pack("<HHQH", VERSION, f.weight, f.n_max, len(name)) + name
    header += struct.pack("<H", FLAG_EXACT if f.exact else 0)
    return header + hashlib.sha256(payload).digest() + payload


def write(path, f: QExpansion) -> Path:
    """Write ``f`` atomically under an advisory lock."""
    path = Path(path)
    data = encode(f)
    with _locked(path, fcntl.LOCK_EX):
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    return path


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise TruncatedFileError("cache file ends before the declared content")
        out = self.data[self.pos:self.pos + count]
        self.pos += count
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _exact_records(payload: bytes, count: int) -> np.ndarray:
    p = _Reader(payload)
    values = []
    for _ in range(count):
        (words,) = p.unpack("<Q")
        values.append(int.from_bytes(p.take(8 * words), "little", signed=True))
    series = np.empty(count, dtype=object)
    series[:] = values
    return series


def decode(data: bytes, n: int | None = None) -> QExpansion:
    r = _Reader(data)
    if r.take(len(MAGIC)) != MAGIC:
        raise CacheVersionError("not a coefficient cache file (bad magic)")
    version, weight, n_file, name_len = r.unpack("<HHQH")
    if version != VERSION:
        raise CacheVersionError(f"cache version {version}, expected {VERSION}")
    form_id = r.take(name_len).decode()
    (flags,) = r.unpack("<H")
    digest = r.take(32)
    payload = data[r.pos:]
    exact = bool(flags & FLAG_EXACT)
    if not exact and len(payload) < 8 * (n_file + 1):
        raise TruncatedFileError(f"payload has {len(payload)} bytes, need {8 * (n_file + 1)}")
    if exact:
        try:
            series = _exact_records(payload, n_file + 1)
        except TruncatedFileError:
            series = None
    else:
        series = np.frombuffer(payload, dtype="<f8", count=n_file + 1).astype(float)
    if hashlib.sha256(payload).digest() != digest:
        if series is None:
            raise TruncatedFileError("exact payload ends before the declared record count")
        raise ChecksumError("cache payload checksum mismatch")
    if n is not None and n > n_file:
        raise InsufficientCacheError(f"cache holds N = {n_file}, {n} requested")
    f = QExpansion.from_series(series, weight=weight, form_id=form_id)
    if not exact:
        f = QExpansion(weight, f.coeffs, form_id, f.constant, rel_roundoff=2.0**-53)
    return f if n is None else f.truncate(n)


def read(path, n: int | None = None) -> QExpansion:
    """Load a cached expansion, optionally truncated to ``n`` coefficients.

    Raises :class:`InsufficientCacheError` rather than regenerating when
    the file holds fewer than ``n`` coefficients.
    """
    path = Path(path)
    with _locked(path, fcntl.LOCK_SH):
        data = path.read_bytes()
    return decode(data, n)
