from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .markov import StochasticMatrix


@dataclass(frozen=True, eq=False)
class CompletionSolution:
    """Minimum of Kemeny's constant over a completion class, with a witness.

    ``unique`` is ``True`` when the witness family is known to be the full
    set of minimizers, ``False`` when other minimizers are known to exist,
    and ``None`` when minimizers have not been characterized.
    """

    value: float
    witness: StochasticMatrix
    method: str
    structure: dict[str, Any] = field(default_factory=dict)
    unique: Optional[bool] = None
