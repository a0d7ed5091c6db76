"""Reference frequency index over (topic, vehicle) pairs and vehicles.

Two build modes share one container. A corpus index counts how many corpus
sentences pair a topic with a vehicle (each sentence contributes at most
once per distinct pair) plus per-instance vehicle occurrences. A knowledge
base index accumulates frequency-weighted plausibility mass per pair and
raw frequency per vehicle. Keys are canonicalized with normalize_phrase at
build time and again at query time; missing keys answer 0.

The on-disk format is a little-endian binary records file, documented in
docs/INDEX_FORMAT.md, with a trailing CRC-32 so truncation and corruption
are caught before any entry is trusted.
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from dataclasses import dataclass
from typing import Iterable, Union

from .similes import (
    CorpusFormatError,
    SimileSentence,
    extract_components,
    normalize_phrase,
    simile_from_record,
)

MAGIC = b"HIDX"
FORMAT_VERSION = 1
MODE_CORPUS = "corpus"
MODE_KB = "kb"
_MODE_CODES = {MODE_CORPUS: 0, MODE_KB: 1}
_CODE_MODES = {code: mode for mode, code in _MODE_CODES.items()}

_HEADER = struct.Struct("<4sHBBI")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_F64 = struct.Struct("<d")

CorpusRecord = Union[SimileSentence, dict, str]


class IndexFormatError(ValueError):
    """Index file is corrupt or from an unsupported writer.

    ``offset`` is the byte position where decoding failed.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class KBFormatError(ValueError):
    """A knowledge base TSV row does not match the documented schema."""


@dataclass(frozen=True)
class SimileTriple:
    """One knowledge base row: topic shares property with vehicle."""

    topic: str
    property: str
    vehicle: str
    frequency: int
    plausibility: float

    def __post_init__(self) -> None:
        if not isinstance(self.frequency, int) or self.frequency < 0:
            raise ValueError(f"frequency must be a non-negative int, got {self.frequency!r}")
        if not 0.0 <= self.plausibility <= 1.0:
            raise ValueError(f"plausibility must be within [0, 1], got {self.plausibility!r}")


class ReferenceIndex:
    """Immutable lookup table; construct via the build_* classmethods."""

    def __init__(
        self,
        mode: str,
        pair_count: dict[tuple[str, str], int],
        pair_mass: dict[tuple[str, str], float],
        vehicle_count: dict[str, int],
        meta: dict,
    ):
        if mode not in _MODE_CODES:
            raise ValueError(f"unknown index mode {mode!r}")
        self.mode = mode
        self._pair_count = dict(pair_count)
        self._pair_mass = dict(pair_mass)
        self._vehicle_count = dict(vehicle_count)
        self.meta = dict(meta)

    # -- construction -------------------------------------------------------

    @classmethod
    def build_from_corpus(
        cls, records: Iterable[CorpusRecord], source: str = ""
    ) -> "ReferenceIndex":
        """Count (topic, vehicle) pairs at sentence granularity.

        Malformed records are skipped and tallied in meta["skipped"]; a
        sentence mentioning the same normalized pair twice still adds 1.
        """
        pair_count: dict[tuple[str, str], int] = {}
        vehicle_count: dict[str, int] = {}
        kept = skipped = 0
        for item in records:
            try:
                simile = _coerce_record(item)
            except CorpusFormatError:
                skipped += 1
                continue
            kept += 1
            pairs_here = set()
            for inst in simile.instances:
                vehicle = normalize_phrase(inst.vehicle.text_in(simile.text))
                if not vehicle:
                    continue
                vehicle_count[vehicle] = vehicle_count.get(vehicle, 0) + 1
                if inst.topic is not None:
                    topic = normalize_phrase(inst.topic.text_in(simile.text))
                    if topic:
                        pairs_here.add((topic, vehicle))
            for pair in pairs_here:
                pair_count[pair] = pair_count.get(pair, 0) + 1
        meta = {"build_timestamp": 0, "records": kept, "skipped": skipped, "source": source}
        return cls(MODE_CORPUS, pair_count, {}, vehicle_count, meta)

    @classmethod
    def build_from_kb(
        cls, triples: Iterable[SimileTriple], source: str = ""
    ) -> "ReferenceIndex":
        """Accumulate frequency-weighted plausibility per (topic, vehicle).

        Per-pair products are collected first and reduced with math.fsum, so
        the result does not depend on row order.
        """
        mass_parts: dict[tuple[str, str], list[float]] = {}
        vehicle_count: dict[str, int] = {}
        kept = skipped = 0
        for triple in triples:
            topic = normalize_phrase(triple.topic)
            vehicle = normalize_phrase(triple.vehicle)
            if not topic or not vehicle:
                skipped += 1
                continue
            kept += 1
            mass_parts.setdefault((topic, vehicle), []).append(
                triple.frequency * triple.plausibility
            )
            vehicle_count[vehicle] = vehicle_count.get(vehicle, 0) + triple.frequency
        pair_mass = {key: math.fsum(parts) for key, parts in mass_parts.items()}
        meta = {"build_timestamp": 0, "records": kept, "skipped": skipped, "source": source}
        return cls(MODE_KB, {}, pair_mass, vehicle_count, meta)

    # -- queries -------------------------------------------------------------

    def pair_count(self, topic: str, vehicle: str) -> int:
        if self.mode != MODE_CORPUS:
            raise ValueError("pair_count is only defined for a corpus index")
        key = (normalize_phrase(topic), normalize_phrase(vehicle))
        return self._pair_count.get(key, 0)

    def pair_mass(self, topic: str, vehicle: str) -> float:
        if self.mode != MODE_KB:
            raise ValueError("pair_mass is only defined for a knowledge base index")
        key = (normalize_phrase(topic), normalize_phrase(vehicle))
        return self._pair_mass.get(key, 0.0)

    def vehicle_count(self, vehicle: str) -> int:
        return self._vehicle_count.get(normalize_phrase(vehicle), 0)

    def __len__(self) -> int:
        return len(self._pair_count) + len(self._pair_mass) + len(self._vehicle_count)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReferenceIndex):
            return NotImplemented
        return (
            self.mode == other.mode
            and self._pair_count == other._pair_count
            and self._pair_mass == other._pair_mass
            and self._vehicle_count == other._vehicle_count
            and self.meta == other.meta
        )

    # -- binary serialization --------------------------------------------------

    def to_bytes(self) -> bytes:
        meta_blob = json.dumps(
            self.meta, sort_keys=True, separators=(",", ":"), ensure_ascii=False
        ).encode("utf-8")
        out = bytearray()
        out += _HEADER.pack(
            MAGIC, FORMAT_VERSION, _MODE_CODES[self.mode], 0, len(meta_blob)
        )
        out += meta_blob
        _write_section(out, self._pair_count, _U64, _join_pair)
        _write_section(out, self._pair_mass, _F64, _join_pair)
        _write_section(out, self._vehicle_count, _U64, lambda k: k)
        out += _U32.pack(zlib.crc32(bytes(out)))
        return bytes(out)

    def save(self, path) -> None:
        blob = self.to_bytes()
        with open(path, "wb") as handle:
            handle.write(blob)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "ReferenceIndex":
        if len(blob) < _HEADER.size + _U32.size:
            raise IndexFormatError("file too short for header and checksum", 0)
        magic, version, mode_code, _, meta_len = _HEADER.unpack_from(blob, 0)
        if magic != MAGIC:
            raise IndexFormatError(f"bad magic {magic!r}", 0)
        if version != FORMAT_VERSION:
            raise IndexFormatError(f"unsupported format version {version}", 4)
        if mode_code not in _CODE_MODES:
            raise IndexFormatError(f"unknown mode code {mode_code}", 6)
        stored_crc = _U32.unpack_from(blob, len(blob) - _U32.size)[0]
        actual_crc = zlib.crc32(blob[: -_U32.size])
        if stored_crc != actual_crc:
            raise IndexFormatError(
                f"checksum mismatch: stored {stored_crc:#010x}, computed {actual_crc:#010x}",
                len(blob) - _U32.size,
            )
        offset = _HEADER.size
        body_end = len(blob) - _U32.size
        meta_end = offset + meta_len
        if meta_end > body_end:
            raise IndexFormatError("metadata extends past end of file", offset)
        try:
            meta = json.loads(blob[offset:meta_end].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise IndexFormatError(f"metadata is not valid JSON: {exc}", offset) from exc
        offset = meta_end
        pair_count, offset = _read_section(blob, offset, body_end, _U64, _split_pair)
        raw_mass, offset = _read_section(blob, offset, body_end, _F64, _split_pair)
        vehicle_raw, offset = _read_section(blob, offset, body_end, _U64, lambda k: k)
        if offset != body_end:
            raise IndexFormatError(
                f"{body_end - offset} unexpected trailing bytes", offset
            )
        return cls(_CODE_MODES[mode_code], pair_count, raw_mass, vehicle_raw, meta)

    @classmethod
    def load(cls, path) -> "ReferenceIndex":
        with open(path, "rb") as handle:
            return cls.from_bytes(handle.read())


def _join_pair(key: tuple[str, str]) -> str:
    # normalize_phrase collapses whitespace, so a tab can never occur inside
    # either half of the key
    return key[0] + "\t" + key[1]


def _split_pair(raw: str) -> tuple[str, str]:
    topic, sep, vehicle = raw.partition("\t")
    if not sep:
        raise ValueError("pair key is missing its separator")
    return topic, vehicle


def _write_section(out: bytearray, table: dict, value_struct: struct.Struct, join) -> None:
    out += _U64.pack(len(table))
    for key in sorted(table, key=lambda k: join(k).encode("utf-8")):
        encoded = join(key).encode("utf-8")
        out += _U32.pack(len(encoded))
        out += encoded
        out += value_struct.pack(table[key])


def _read_section(blob: bytes, offset: int, body_end: int, value_struct, split):
    if offset + _U64.size > body_end:
        raise IndexFormatError("truncated section header", offset)
    (count,) = _U64.unpack_from(blob, offset)
    offset += _U64.size
    table = {}
    for _ in range(count):
        if offset + _U32.size > body_end:
            raise IndexFormatError("truncated entry key length", offset)
        (key_len,) = _U32.unpack_from(blob, offset)
        offset += _U32.size
        if offset + key_len + value_struct.size > body_end:
            raise IndexFormatError("truncated entry", offset)
        try:
            raw_key = blob[offset : offset + key_len].decode("utf-8")
            key = split(raw_key)
        except (UnicodeDecodeError, ValueError) as exc:
            raise IndexFormatError(f"bad entry key: {exc}", offset) from exc
        offset += key_len
        (value,) = value_struct.unpack_from(blob, offset)
        offset += value_struct.size
        table[key] = value
    return table, offset


def _coerce_record(item: CorpusRecord) -> SimileSentence:
    """Accept annotated similes, un-annotated text, or JSON corpus lines.

    Text without component annotations goes through extraction; text in
    which no simile can be found is rejected so the caller counts it.
    """
    if isinstance(item, SimileSentence):
        return item
    if isinstance(item, dict):
        if item.get("instances"):
            return simile_from_record(item)
        text = item.get("text")
        if not isinstance(text, str):
            raise CorpusFormatError("corpus record needs a 'text' string")
        return _extract_or_reject(text)
    if isinstance(item, str):
        try:
            decoded = json.loads(item)
        except json.JSONDecodeError:
            return _extract_or_reject(item)
        if isinstance(decoded, (dict, str)):
            return _coerce_record(decoded)
        raise CorpusFormatError("corpus line must be an object or a string")
    raise CorpusFormatError(f"unsupported corpus record type {type(item).__name__}")


def _extract_or_reject(text: str) -> SimileSentence:
    simile = extract_components(text)
    if simile is None or not simile.instances:
        raise CorpusFormatError("no simile found in record")
    return simile


# ---------------------------------------------------------------------------
# Knowledge base TSV


def read_kb_tsv(path) -> Iterable[SimileTriple]:
    """Yield triples from a tab-separated file.

    Schema per row: topic, property, vehicle, frequency, plausibility.
    Blank lines and '#' comments are allowed; anything else malformed
    raises KBFormatError with the offending line number.
    """
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise KBFormatError(f"line {lineno}: expected 5 fields, got {len(fields)}")
            topic, prop, vehicle, freq_raw, plaus_raw = fields
            try:
                frequency = int(freq_raw)
                plausibility = float(plaus_raw)
                yield SimileTriple(topic, prop, vehicle, frequency, plausibility)
            except ValueError as exc:
                raise KBFormatError(f"line {lineno}: {exc}") from exc
