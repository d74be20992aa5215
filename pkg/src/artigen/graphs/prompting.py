"""Chat-prompt assembly and response parsing for graph prediction.

The protocol asks a vision-language model to reason step by step (part
recognition, then connectivity) and finish with a fenced ``graph`` block:

    ```graph
    0 base
    1 door parent 0
    2 handle parent 1
    ```

Statements may be newline- or semicolon-separated. In-context examples use
textual scene descriptions rather than images, which works better than
real example images. Templates, example sets, and the label synonym table
are versioned text assets under ``artigen/assets/prompts``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

from ..core import ConnectivityGraph, SemanticLabel
from ..core.graph import validate_graph
from ..errors import (
    GraphValidationError,
    NoExamples,
    NoParseableBlock,
    UnknownLabel,
    ValidationError,
)

_VOCABULARY = {label.value: label for label in SemanticLabel}
_STATEMENT = re.compile(
    r"(?P<id>\d+)\s+(?P<label>[A-Za-z_\-]+)(?:\s+parent\s+(?P<parent>\d+))?",
    re.IGNORECASE,
)
_FENCED = re.compile(r"```[a-zA-Z]*[ \t]*\n(.*?)```", re.DOTALL)

QUERY_TEXT = ("Here is the object image. Recognize the articulated parts "
              "and predict the part connectivity graph.")


def _asset_text(name: str) -> str:
    return (resources.files("artigen") / "assets" / "prompts" / name).read_text()


def default_response_schema() -> str:
    return _asset_text("schema_v1.txt")


@dataclass(frozen=True)
class PromptExample:
    """One in-context exchange: scene description and ideal reply."""

    description: str
    response: str


def load_example_set(set_id: str = "v1") -> tuple:
    raw = json.loads(_asset_text(f"examples_{set_id}.json"))
    return tuple(PromptExample(e["description"], e["response"]) for e in raw)


def load_synonyms(set_id: str = "v1") -> dict:
    return dict(json.loads(_asset_text(f"synonyms_{set_id}.json")))


def build_prompt(image_ref: str, examples, response_schema: str | None = None) -> list:
    """Chat messages: system, alternating example pairs, then the image.

    ``image_ref`` may be an URL or data URI; it is passed through untouched.
    """
    examples = tuple(examples)
    if not examples:
        raise NoExamples("at least one in-context example is required")
    schema = response_schema if response_schema is not None else default_response_schema()
    system = _asset_text("system_v1.txt").format(schema=schema)
    messages = [{"role": "system", "content": system}]
    for ex in examples:
        messages.append({"role": "user", "content": ex.description})
        messages.append({"role": "assistant", "content": ex.response})
    messages.append({
        "role": "user",
        "content": [
            {"type": "text", "text": QUERY_TEXT},
            {"type": "image_url", "image_url": {"url": image_ref}},
        ],
    })
    return messages


def _resolve_label(token: str, synonyms: dict) -> SemanticLabel:
    name = token.lower()
    if name in _VOCABULARY:
        return _VOCABULARY[name]
    mapped = synonyms.get(name)
    if mapped is not None and mapped in _VOCABULARY:
        return _VOCABULARY[mapped]
    raise UnknownLabel(f"label {token!r} is outside the vocabulary")


def parse_response(text: str, synonyms: dict | None = None) -> ConnectivityGraph:
    """Extract and validate the graph block of a model reply.

    The last fenced block wins (the reply ends with the final answer); a
    reply with no fence at all is tried as a bare statement list.
    """
    synonyms = load_synonyms() if synonyms is None else synonyms
    blocks = _FENCED.findall(text)
    block = blocks[-1] if blocks else text
    statements = [s.strip() for part in block.split("\n")
                  for s in part.split(";") if s.strip()]
    if not statements:
        raise NoParseableBlock("reply contains no graph statements")
    nodes = []
    parent_of = {}
    seen = set()
    for stmt in statements:
        m = _STATEMENT.fullmatch(stmt)
        if m is None:
            raise NoParseableBlock(f"unparseable statement {stmt!r}")
        pid = int(m.group("id"))
        if pid in seen:
            raise ValidationError(f"duplicate part id {pid}")
        seen.add(pid)
        nodes.append((pid, _resolve_label(m.group("label"), synonyms)))
        if m.group("parent") is not None:
            parent_of[pid] = int(m.group("parent"))
    graph = ConnectivityGraph(nodes, parent_of)
    try:
        validate_graph(graph)
    except GraphValidationError as e:
        raise ValidationError(str(e), cause=e) from e
    return graph
