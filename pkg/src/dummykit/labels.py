"""Label universe: a run-scoped string <-> integer dictionary."""

from __future__ import annotations

from typing import Iterable

DUMMY_VERTEX = 0
DUMMY_EDGE = 1

DUMMY_VERTEX_NAME = "__DUMMY_V__"
DUMMY_EDGE_NAME = "__DUMMY_E__"

LabelSet = tuple  # sorted, duplicate-free tuple of int label ids


def labelset(ids: Iterable[int]) -> LabelSet:
    return tuple(sorted(set(ids)))


class LabelUniverse:
    """Interns label strings. The two dummy ids are allocated first, so they
    are 0 and 1 in every universe."""

    def __init__(self):
        self._ids: dict[str, int] = {}
        self._names: list[str] = []
        self.intern(DUMMY_VERTEX_NAME)
        self.intern(DUMMY_EDGE_NAME)

    def intern(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            if not name or any(c.isspace() for c in name) or "," in name or name == "-":
                raise ValueError(f"label {name!r} cannot be serialized")
            i = len(self._names)
            self._ids[name] = i
            self._names.append(name)
            return i

    def labels(self, *names: str) -> LabelSet:
        return labelset(self.intern(n) for n in names)

    def name(self, label_id: int) -> str:
        return self._names[label_id]

    def names(self, ls: LabelSet) -> list[str]:
        return [self._names[i] for i in ls]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)

    def items(self):
        return list(self._ids.items())


# process-wide default used when callers do not thread their own universe
UNIVERSE = LabelUniverse()
