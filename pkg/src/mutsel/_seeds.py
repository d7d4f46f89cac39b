"""Deterministic seed derivation for every random draw in the toolkit.

A child seed is a 64-bit hash of a parent seed plus a tuple of integer
role/index tokens, computed with numpy's SeedSequence. Every fold plan,
mutation draw and stochastic fit gets a seed that depends only on
(parent seed, role, indices), never on execution order, so parallel
schedules cannot change any result.

Role tokens (part of the documented seed contract):

    OUTER_PLAN     outer fold plan of repeat r          mix(s, OUTER_PLAN, r)
    SELECT         selection round, repeat r, fold j    mix(s, SELECT, r, j, strat)
    REFIT          refit of the selected candidate      mix(s, REFIT, r, j, strat)
    FINAL_REFIT    whole-dataset refit                  mix(s, FINAL_REFIT, strat)
    CV_INNER_PLAN  inner fold plan inside a selection   mix(sel, CV_INNER_PLAN)
    CV_FIT         per inner fold fit                   mix(sel, CV_FIT, fold)
    MV_DRAW        label mutation draw, repeat d        mix(sel, MV_DRAW, d)
    MV_FIT         clean/mutated fit, repeat d          mix(sel, MV_FIT, d, which)

with strat one of STRATEGY_CV / STRATEGY_MV.
"""

from __future__ import annotations

import numpy as np

OUTER_PLAN = 11
SELECT = 12
REFIT = 13
FINAL_REFIT = 14

CV_INNER_PLAN = 21
CV_FIT = 22
MV_DRAW = 23
MV_FIT = 24

STRATEGY_CV = 1
STRATEGY_MV = 2

_MASK64 = (1 << 64) - 1


def mix(seed, *tokens):
    """Derive a 64-bit child seed from ``seed`` and integer tokens."""
    entropy = (int(seed) & _MASK64,) + tuple(int(t) & _MASK64 for t in tokens)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def rng(seed):
    """A Generator seeded with the (masked) integer ``seed``."""
    return np.random.default_rng(int(seed) & _MASK64)
