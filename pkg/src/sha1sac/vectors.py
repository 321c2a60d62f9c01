"""NIST CAVP byte-oriented SHA-1 response files (``.rsp``).

The files hold ``Len = n`` / ``Msg = hex`` / ``MD = hex`` triples.  ``Len``
is in bits; a zero-length message is written as ``Msg = 00``.
"""

from __future__ import annotations

import dataclasses
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .sha1_core import sha1

VECTOR_FILES = ("SHA1ShortMsg.rsp", "SHA1LongMsg.rsp")

# Reference digests that are checked in addition to the .rsp files.
BUILTIN_VECTORS = (
    (b"abc", "a9993e364706816aba3e25717850c26c9cd0d89d"),
    (b"", "da39a3ee5e6b4b0d3255bfef95601890afd80709"),
)


class VectorFileError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class HashVector:
    source: str
    index: int
    message: bytes
    digest: str


@dataclasses.dataclass(frozen=True)
class VectorResult:
    vector: HashVector
    actual: str

    @property
    def passed(self) -> bool:
        return self.actual == self.vector.digest


def parse_rsp(lines: Iterable[str], source: str = "<rsp>") -> Iterator[HashVector]:
    fields: dict[str, str] = {}
    index = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("["):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise VectorFileError(f"{source}:{lineno}: unparseable line {line!r}")
        key, value = key.strip(), value.strip()
        if key not in ("Len", "Msg", "MD"):
            continue
        fields[key] = value
        if key == "MD":
            if "Len" not in fields or "Msg" not in fields:
                raise VectorFileError(f"{source}:{lineno}: MD without Len/Msg")
            nbits = int(fields["Len"])
            if nbits % 8:
                raise VectorFileError(f"{source}:{lineno}: bit-oriented vector (Len={nbits})")
            msg = bytes.fromhex(fields["Msg"])[: nbits // 8]
            if len(msg) != nbits // 8:
                raise VectorFileError(f"{source}:{lineno}: Msg shorter than Len")
            yield HashVector(source, index, msg, value.lower())
            index += 1
            fields = {}


def load_rsp(path: Path) -> list[HashVector]:
    with open(path, encoding="ascii") as fh:
        return list(parse_rsp(fh, source=path.name))


def default_vector_dir() -> Path:
    return Path(str(resources.files("sha1sac") / "data"))


def find_vector_files(directory: Path) -> list[Path]:
    directory = Path(directory)
    paths = [directory / name for name in VECTOR_FILES]
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise VectorFileError("missing vector file(s): " + ", ".join(missing))
    return paths


def run_vectors(
    vectors: Iterable[HashVector], hash_fn: Callable[[bytes], bytes] = sha1
) -> list[VectorResult]:
    return [VectorResult(v, hash_fn(v.message).hex()) for v in vectors]


def builtin_vectors() -> list[HashVector]:
    return [HashVector("builtin", i, m, d) for i, (m, d) in enumerate(BUILTIN_VECTORS)]


@dataclasses.dataclass
class ValidationReport:
    results: list[VectorResult]
    empty_files: list[str]

    @property
    def failures(self) -> list[VectorResult]:
        return [r for r in self.results if not r.passed]

    @property
    def ok(self) -> bool:
        # An empty vector file must not count as a vacuous pass.
        return bool(self.results) and not self.failures and not self.empty_files


def validate(
    directory: Path | None = None, hash_fn: Callable[[bytes], bytes] = sha1
) -> ValidationReport:
    paths = find_vector_files(directory if directory is not None else default_vector_dir())
    results: list[VectorResult] = []
    empty: list[str] = []
    for path in paths:
        vectors = load_rsp(path)
        if not vectors:
            empty.append(str(path))
        results.extend(run_vectors(vectors, hash_fn))
    results.extend(run_vectors(builtin_vectors(), hash_fn))
    return ValidationReport(results, empty)
