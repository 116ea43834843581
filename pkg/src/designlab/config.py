"""Runtime budgets.

The dimension budget caps ``d**t`` (rows of any operator on the t-fold
tensor space).  It can be set with the ``DESIGNLAB_BUDGET_DIM`` environment
variable or :func:`set_budget_dim`.
"""
import os

from .errors import BudgetError

DEFAULT_BUDGET_DIM = 65536
ENV_BUDGET_DIM = "DESIGNLAB_BUDGET_DIM"

_override = None


def budget_dim():
    if _override is not None:
        return _override
    value = os.environ.get(ENV_BUDGET_DIM)
    return int(value) if value else DEFAULT_BUDGET_DIM


def set_budget_dim(value):
    """Override the dimension budget for this process (``None`` resets)."""
    global _override
    _override = None if value is None else int(value)


def check_dim(d, t, what="operator"):
    dim = d**t
    if dim > budget_dim():
        raise BudgetError(
            f"{what} on ({d})^{t} = {dim} rows exceeds budget {budget_dim()}"
        )
    return dim


def check_nnz(nnz, d, t, what="sparse operator"):
    limit = 4**t * d**t
    if nnz > limit:
        raise BudgetError(f"{what} with {nnz} nonzeros exceeds budget {limit}")
    return nnz
