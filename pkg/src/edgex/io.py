"""Reading and writing interaction files.

Text format: one interaction per line, whitespace-separated vertex tokens,
line order giving the edge labels.  Lines starting with ``#`` are comments,
blank lines are skipped and lines starting with ``%`` carry ``key=value``
header fields, e.g.::

    %edgex v=4 e=3 directed=0
    %seed=42 %params=alpha=0.5,theta=1,regime=infinite,nu=2:1
    1 2
    2 3
    3 4

A plain two-column edge list is the binary special case.
"""
from __future__ import annotations

import hashlib
import io
import os
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, TextIO, Union

from . import __version__
from .errors import ParseError
from .network import EdgeLabeledNetwork, canonicalize

PathLike = Union[str, os.PathLike]


@dataclass
class InteractionData:
    """Raw interactions with tokens mapped to integer ids by first appearance."""

    interactions: List[List[int]]
    tokens: List[str]
    header: Dict[str, str] = field(default_factory=dict)
    digest: str = ""

    def network(self, directed: Optional[bool] = None) -> EdgeLabeledNetwork:
        if directed is None:
            directed = self.header.get("directed", "1") != "0"
        return canonicalize(self.interactions, directed)


def _parse_header(line: str, lineno: int, header: Dict[str, str]) -> None:
    for part in line.split():
        part = part.lstrip("%")
        if not part:
            continue
        if part == "edgex":
            header["edgex"] = "1"
            continue
        if "=" not in part:
            raise ParseError(f"malformed header field {part!r}", lineno)
        key, value = part.split("=", 1)
        header[key] = value


def parse_interactions(stream: TextIO) -> InteractionData:
    ids: Dict[str, int] = {}
    tokens: List[str] = []
    interactions: List[List[int]] = []
    header: Dict[str, str] = {}
    sha = hashlib.sha256()
    for lineno, line in enumerate(stream, 1):
        sha.update(line.encode())
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if text.startswith("%"):
            _parse_header(text, lineno, header)
            continue
        row = []
        for tok in text.split():
            i = ids.get(tok)
            if i is None:
                i = ids[tok] = len(tokens) + 1
                tokens.append(tok)
            row.append(i)
        interactions.append(row)
    data = InteractionData(interactions, tokens, header, sha.hexdigest())
    _check_header(data)
    return data


def _check_header(data: InteractionData) -> None:
    h = data.header
    for key in ("v", "e"):
        if key in h and not h[key].isdigit():
            raise ParseError(f"header field {key}={h[key]!r} is not a count", 1)
    if "directed" in h and h["directed"] not in ("0", "1"):
        raise ParseError(f"header field directed={h['directed']!r} must be 0 or 1", 1)
    if "e" in h and int(h["e"]) != len(data.interactions):
        raise ParseError(f"header declares e={h['e']} but file holds {len(data.interactions)} interactions")
    if "v" in h and int(h["v"]) != len(data.tokens):
        raise ParseError(f"header declares v={h['v']} but file holds {len(data.tokens)} vertices")


def read_interactions(path: PathLike) -> InteractionData:
    with open(path) as fh:
        return parse_interactions(fh)


def load_network(path: PathLike, directed: Optional[bool] = None) -> EdgeLabeledNetwork:
    return read_interactions(path).network(directed)


def format_network(net: EdgeLabeledNetwork, provenance: Optional[Dict[str, Hashable]] = None) -> str:
    s = net.stats
    buf = io.StringIO()
    buf.write(f"%edgex v={s.v} e={s.e} directed={int(net.directed)}\n")
    if provenance:
        buf.write(" ".join(f"%{k}={v}" for k, v in provenance.items()) + "\n")
    for edge in net.edges:
        buf.write(" ".join(map(str, edge)) + "\n")
    return buf.getvalue()


def write_network(net: EdgeLabeledNetwork, path: PathLike, provenance=None) -> None:
    with open(path, "w") as fh:
        fh.write(format_network(net, provenance))


def write_tokens(data: InteractionData, path: PathLike) -> None:
    """Token-to-id dictionary, one ``id<TAB>token`` per line."""
    with open(path, "w") as fh:
        for i, tok in enumerate(data.tokens, 1):
            fh.write(f"{i}\t{tok}\n")


def file_digest(path: PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(**fields) -> Dict[str, Hashable]:
    out = {"version": __version__}
    out.update({k: v for k, v in fields.items() if v is not None})
    return out
