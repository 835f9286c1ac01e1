"""Effect records: one entry per membrane crossing on an outside object."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from decent.heap import Loc

HAS, GET, SET, CALL = "has", "get", "set", "call"
READ_KINDS = (HAS, GET)

# where the value a ``set`` replaced came from; drives rollback
OLD_FROM_SHADOW = "shadow"
OLD_FROM_TARGET = "target"
OLD_ABSENT = "absent"


@dataclass(frozen=True)
class EffectRecord:
    seq: int
    sandbox_id: int
    kind: str
    target: Loc
    prop: Optional[str] = None
    observed: object = None
    old_value: object = None
    new_value: object = None
    old_source: Optional[str] = None

    @property
    def is_read(self):
        return self.kind in READ_KINDS

    @property
    def is_write(self):
        return self.kind == SET


def sandbox_tag(sandbox_id: int) -> str:
    return "SBX%03d" % sandbox_id


def format_effect(e: EffectRecord, with_tag: bool = False) -> str:
    name = "-" if e.prop is None else e.prop
    text = f"({e.seq}) {e.kind} [name={name}]"
    if with_tag:
        text += "@" + sandbox_tag(e.sandbox_id)
    return text
