import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krfoam.fields import QQ, F3, F5
from krfoam.linalg import ExactMatrix
from krfoam.module_structure import (ModuleStructureError, NilpotentProfile,
                                     is_free_truncated, jordan_profile)


def shift_block(n):
    A = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        A[i + 1, i] = 1
    return A


def blockdiag(sizes):
    n = sum(sizes)
    A = np.zeros((n, n), dtype=np.int64)
    off = 0
    for s in sizes:
        A[off:off + s, off:off + s] = shift_block(s)
        off += s
    return A


def test_zero_map():
    X = ExactMatrix.zeros(F3, 3, 3)
    p = jordan_profile(X, 2)
    assert p.blocks == (1, 1, 1)
    assert not is_free_truncated(p)


def test_single_regular_block():
    for N in (2, 3, 4):
        X = ExactMatrix(QQ, blockdiag([N]).tolist())
        p = jordan_profile(X, N)
        assert p.blocks == (N,)
        assert is_free_truncated(p)


def test_mixed_blocks():
    X = ExactMatrix(F5, blockdiag([2, 1]))
    p = jordan_profile(X, 2)
    assert p.blocks == (2, 1)
    assert p.rank_sequence == (3, 1, 0)
    assert not is_free_truncated(p)


def test_zero_dim_is_free():
    X = ExactMatrix.zeros(QQ, 0, 0)
    p = jordan_profile(X, 3)
    assert p.dim == 0
    assert is_free_truncated(p)


def test_non_nilpotent_rejected():
    X = ExactMatrix.identity(F3, 2)
    with pytest.raises(ModuleStructureError):
        jordan_profile(X, 3)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=4),
       st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_profile_invariant_under_conjugation(sizes, seed):
    rng = random.Random(seed)
    N = max(sizes)
    p = 5
    n = sum(sizes)
    A = blockdiag(sizes)
    # random invertible conjugator over F_5
    while True:
        P = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)])
        M = ExactMatrix(F5, P)
        if M.rank() == n:
            break
    Pinv = M.solve_right(ExactMatrix.identity(F5, n))
    X = M @ ExactMatrix(F5, A) @ Pinv
    prof = jordan_profile(X, N)
    assert sorted(prof.blocks, reverse=True) == sorted(sizes, reverse=True)
    assert is_free_truncated(prof) == all(s == N for s in sizes)


def test_freeness_divisibility():
    p = jordan_profile(ExactMatrix(QQ, blockdiag([2, 2, 1]).tolist()), 2)
    assert not is_free_truncated(p)  # dim 5 not divisible by 2
    p = jordan_profile(ExactMatrix(QQ, blockdiag([2, 2]).tolist()), 2)
    assert is_free_truncated(p)


def test_profile_json():
    p = jordan_profile(ExactMatrix(QQ, blockdiag([2, 1]).tolist()), 2)
    d = p.to_json_dict()
    assert d["blocks"] == [2, 1]
    assert d["free"] is False
