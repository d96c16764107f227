"""graph6 reading/writing and sparse6 reading (nauty formats)."""

from __future__ import annotations

from pathlib import Path as FilePath
from typing import Iterator

from .errors import Graph6Error
from .graph import Graph

HEADER = ">>graph6<<"
SPARSE_HEADER = ">>sparse6<<"


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def _decode_n(data: bytes, offset: int) -> tuple[int, int]:
    """Return ``(n, bytes consumed)``."""
    if not data:
        raise Graph6Error("empty input", offset)
    for i, b in enumerate(data[:8]):
        if not 63 <= b <= 126:
            raise Graph6Error(f"byte {b} outside 63..126", offset + i)
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise Graph6Error("truncated 8-byte size field", offset + len(data))
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        return n, 8
    if len(data) < 4:
        raise Graph6Error("truncated 4-byte size field", offset + len(data))
    n = 0
    for b in data[1:4]:
        n = (n << 6) | (b - 63)
    return n, 4


def write_graph6(G: Graph, header: bool = False) -> str:
    """Canonical graph6 text for ``G`` (no trailing newline)."""
    out = [HEADER] if header else []
    out.append(_encode_n(G.n))
    acc = 0
    nbits = 0
    for j in range(1, G.n):
        rj = G.rows[j]
        for i in range(j):
            acc = (acc << 1) | ((rj >> i) & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(acc + 63))
                acc = nbits = 0
    if nbits:
        out.append(chr((acc << (6 - nbits)) + 63))
    return "".join(out)


def parse_graph6(text: str | bytes) -> Graph:
    """Parse a single graph6 string; trailing newline and header are accepted."""
    data = text.encode("ascii", "replace") if isinstance(text, str) else bytes(text)
    base = 0
    if data.startswith(HEADER.encode()):
        data = data[len(HEADER):]
        base = len(HEADER)
    if data.endswith(b"\n"):
        data = data[:-1]
    if data.endswith(b"\r"):
        data = data[:-1]
    n, used = _decode_n(data, base)
    total_bits = n * (n - 1) // 2
    need = (total_bits + 5) // 6
    body = data[used:]
    if len(body) < need:
        raise Graph6Error(f"expected {need} adjacency bytes, got {len(body)}", base + len(data))
    if len(body) > need:
        raise Graph6Error("trailing garbage after adjacency bytes", base + used + need)
    rows = [0] * n
    k = 0
    i, j = 0, 1
    for idx, b in enumerate(body):
        if not 63 <= b <= 126:
            raise Graph6Error(f"byte {b} outside 63..126", base + used + idx)
        val = b - 63
        for shift in range(5, -1, -1):
            bit = (val >> shift) & 1
            if k < total_bits:
                if bit:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                k += 1
                i += 1
                if i == j:
                    i, j = 0, j + 1
            elif bit:
                raise Graph6Error("non-zero padding bits", base + used + idx)
    return Graph(n, tuple(rows))


def parse_sparse6(text: str | bytes) -> Graph:
    """Parse a single (non-incremental) sparse6 string."""
    data = text.encode("ascii", "replace") if isinstance(text, str) else bytes(text)
    base = 0
    if data.startswith(SPARSE_HEADER.encode()):
        data = data[len(SPARSE_HEADER):]
        base = len(SPARSE_HEADER)
    data = data.rstrip(b"\r\n")
    if not data or data[:1] != b":":
        raise Graph6Error("sparse6 must start with ':'", base)
    n, used = _decode_n(data[1:], base + 1)
    body = data[1 + used:]
    for idx, b in enumerate(body):
        if not 63 <= b <= 126:
            raise Graph6Error(f"byte {b} outside 63..126", base + 1 + used + idx)
    k = 1
    while (1 << k) < n:
        k += 1
    stream = []
    for b in body:
        val = b - 63
        stream.extend((val >> s) & 1 for s in range(5, -1, -1))
    rows = [0] * n
    v = 0
    pos = 0
    while pos + 1 + k <= len(stream):
        b = stream[pos]
        x = 0
        for bit in stream[pos + 1:pos + 1 + k]:
            x = (x << 1) | bit
        pos += 1 + k
        if b:
            v += 1
        if v >= n:
            break
        if x > v:
            v = x
        elif x != v:
            rows[x] |= 1 << v
            rows[v] |= 1 << x
        else:
            raise Graph6Error("self-loop in sparse6 data", base + 1 + used + pos // 6)
    return Graph(n, tuple(rows))


def parse_any(line: str) -> Graph:
    s = line.strip()
    if s.startswith(":") or s.startswith(SPARSE_HEADER):
        return parse_sparse6(s)
    return parse_graph6(s)


def iter_graph_file(path: str | FilePath) -> Iterator[Graph]:
    """One graph per line; blank lines and ``#`` comments are skipped."""
    with open(path, encoding="ascii") as fh:
        for line in fh:
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            yield parse_any(s)


def write_graph_file(path: str | FilePath, graphs) -> int:
    count = 0
    with open(path, "w", encoding="ascii") as fh:
        for g in graphs:
            fh.write(write_graph6(g) + "\n")
            count += 1
    return count
