"""Report structures shared by the checkers and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of one structured verification: named sub-checks with witnesses."""

    name: str
    entries: list = field(default_factory=list)

    def add(self, label: str, ok: bool, witness=None):
        self.entries.append((label, bool(ok), witness))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def first_violation(self):
        for label, ok, witness in self.entries:
            if not ok:
                return (label, witness)
        return None

    def __str__(self):
        lines = [f"{'PASS' if ok else 'FAIL'}  {label}" +
                 (f"  [{witness}]" if witness is not None and not ok else "")
                 for label, ok, witness in self.entries]
        return f"== {self.name} ==\n" + "\n".join(lines)
