"""Mass-action reaction networks and their stoichiometric first integrals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import null_space


@dataclass(frozen=True, slots=True)
class Reaction:
    reactants: Mapping[str, int]
    products: Mapping[str, int]
    rate: float
    label: str = ""


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]
    label: str = "network"
    _index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        index = {name: i for i, name in enumerate(self.species)}
        for reaction in self.reactions:
            unknown = (set(reaction.reactants) | set(reaction.products)) - set(index)
            if unknown:
                raise ValueError(f"reaction {reaction.label!r} uses unknown species {sorted(unknown)}")
        object.__setattr__(self, "_index", index)

    def stoichiometric_matrix(self) -> np.ndarray:
        s = np.zeros((len(self.species), len(self.reactions)))
        for j, reaction in enumerate(self.reactions):
            for name, count in reaction.reactants.items():
                s[self._index[name], j] -= count
            for name, count in reaction.products.items():
                s[self._index[name], j] += count
        return s

    def rates(self, v: Sequence[float]) -> np.ndarray:
        conc = np.asarray(v, dtype=float)
        out = np.empty(len(self.reactions))
        for j, reaction in enumerate(self.reactions):
            value = reaction.rate
            for name, count in reaction.reactants.items():
                value *= conc[self._index[name]] ** count
            out[j] = value
        return out

    def rhs(self, v: Sequence[float]) -> np.ndarray:
        return self.stoichiometric_matrix() @ self.rates(v)

    def conservation_laws(self) -> np.ndarray:
        """Rows span the left null space of S (linear first integrals)."""

        return null_space(self.stoichiometric_matrix().T).T

    def concentrations(self, values: Mapping[str, float]) -> np.ndarray:
        return np.array([float(values.get(name, 0.0)) for name in self.species])
