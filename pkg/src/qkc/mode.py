"""Execution modes shared by the frontend interpreter and the runtimes."""

from __future__ import annotations

from enum import Enum


class ExecutionMode(Enum):
    NISQ = "nisq"  # queue instructions, submit the whole circuit once
    FTQC = "ftqc"  # stream instructions, measurements return live bits

    @classmethod
    def parse(cls, value: "str | ExecutionMode") -> "ExecutionMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown execution mode {value!r}; expected 'nisq' or 'ftqc'") from None
