"""Jordan profiles of nilpotent operators and the freeness criterion.

A nilpotent endomorphism X with X^N = 0 acts on its space as a module
over F[X]/X^N; the module is free exactly when every Jordan block has
size N, equivalently rank(X^(N-1)) = dim/N.  Everything is decided from
the rank sequence of powers, never from an explicit decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import ExactMatrix


class ModuleStructureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NilpotentProfile:
    N: int
    dim: int
    blocks: tuple  # Jordan block sizes, descending
    rank_sequence: tuple  # ranks of X^0 .. X^N

    def __post_init__(self):
        if sum(self.blocks) != self.dim:
            raise ModuleStructureError("block sizes do not sum to the dimension")
        rs = self.rank_sequence
        if rs[0] != self.dim or rs[-1] != 0:
            raise ModuleStructureError("rank sequence must run dim .. 0")
        for a, b in zip(rs, rs[1:]):
            if a < b or (a > 0 and a == b and b != 0):
                raise ModuleStructureError("rank sequence must strictly decrease to 0")

    @property
    def is_free(self) -> bool:
        return all(b == self.N for b in self.blocks)

    def to_json_dict(self) -> dict:
        return {
            "n": self.N,
            "dim": self.dim,
            "blocks": list(self.blocks),
            "ranks": list(self.rank_sequence),
            "free": self.is_free,
        }


def jordan_profile(X: ExactMatrix, N: int) -> NilpotentProfile:
    """Block profile of a nilpotent matrix from ranks of its powers.

    Raises if X^N != 0 (which would signal an upstream bug: basepoint
    operators are nilpotent of order N by construction).
    """
    if X.nrows != X.ncols:
        raise ModuleStructureError("profile of a non-square matrix")
    dim = X.nrows
    ranks = [dim]
    P = ExactMatrix.identity(X.field, dim)
    for _ in range(N):
        P = P @ X
        ranks.append(P.rank())
    if ranks[-1] != 0:
        raise ModuleStructureError(f"X^{N} != 0 (rank {ranks[-1]})")
    blocks = []
    for k in range(1, N + 1):
        # number of blocks of size >= k
        n_ge = ranks[k - 1] - ranks[k]
        blocks.append(n_ge)
    sizes = []
    for k in range(N, 0, -1):
        exact = blocks[k - 1] - (blocks[k] if k < N else 0)
        sizes.extend([k] * exact)
    return NilpotentProfile(N, dim, tuple(sizes), tuple(ranks[: N + 1]))


def is_free_truncated(profile: NilpotentProfile) -> bool:
    """Freeness over F[X]/X^N: every block has size exactly N.

    The zero module counts as free (vacuously).
    """
    if profile.dim == 0:
        return True
    if profile.dim % profile.N != 0:
        return False
    return profile.rank_sequence[profile.N - 1] == profile.dim // profile.N
