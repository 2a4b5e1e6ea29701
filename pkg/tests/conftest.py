import numpy as np

from resyduo import RatingMatrix


def binary_matrix(rows, row_labels=None, col_labels=None, dense=True):
    """Small binary RatingMatrix from a list of 0/1 rows.

    dense=True marks every cell observed (the projection convention, where
    zeros are real "not used" facts); dense=False only marks the ones.
    """
    values = np.asarray(rows, dtype=float)
    n, m = values.shape
    if row_labels is None:
        row_labels = [f"r{i:02d}" for i in range(n)]
    if col_labels is None:
        col_labels = [f"c{j:02d}" for j in range(m)]
    observed = np.ones(values.shape, dtype=bool) if dense else values > 0
    return RatingMatrix(tuple(row_labels), tuple(col_labels), values, observed)
