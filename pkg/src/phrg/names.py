"""Fresh label generation."""

from __future__ import annotations

from typing import Iterable


class Namer:
    """Hands out label names that avoid every name seen so far."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name = base
        while name in self.taken:
            name += "'"
        self.taken.add(name)
        return name

    def reserve(self, names: Iterable[str]) -> None:
        self.taken.update(names)
