"""Rectangular tables of distribution-valued cells."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .modal import DEFAULT_RESOLUTION, ModalValue
from .quantile import QuantileFunction

__all__ = ["DistributionalTable"]


@dataclass(frozen=True)
class DistributionalTable:
    """n individuals by p variables, every cell a modal description."""

    variable_names: tuple[str, ...]
    cells: tuple[tuple[ModalValue, ...], ...]

    def __post_init__(self) -> None:
        names = tuple(str(n) for n in self.variable_names)
        object.__setattr__(self, "variable_names", names)
        rows = tuple(tuple(row) for row in self.cells)
        object.__setattr__(self, "cells", rows)
        if len(names) == 0:
            raise ValidationError("table must declare at least one variable")
        if len(set(names)) != len(names):
            raise ValidationError("variable names must be unique")
        if len(rows) == 0:
            raise ValidationError("table must contain at least one individual")
        for i, row in enumerate(rows):
            if len(row) != len(names):
                raise ValidationError(
                    f"row {i} has {len(row)} cells, expected {len(names)}"
                )
            for j, cell in enumerate(row):
                if not isinstance(cell, ModalValue):
                    raise ValidationError(
                        f"row {i}, variable {names[j]!r}: cell is not a modal value"
                    )

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def p(self) -> int:
        return len(self.variable_names)

    def column(self, j: int) -> tuple[ModalValue, ...]:
        return tuple(row[j] for row in self.cells)

    def quantile_column(self, j: int, resolution: int = DEFAULT_RESOLUTION) -> list[QuantileFunction]:
        return [row[j].to_quantile(resolution=resolution) for row in self.cells]

    def quantile_columns(self, resolution: int = DEFAULT_RESOLUTION) -> list[list[QuantileFunction]]:
        return [self.quantile_column(j, resolution=resolution) for j in range(self.p)]

    def quantile_rows(self, resolution: int = DEFAULT_RESOLUTION) -> list[list[QuantileFunction]]:
        return [[cell.to_quantile(resolution=resolution) for cell in row] for row in self.cells]
