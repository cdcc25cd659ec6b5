"""Quartile rules for the error box plots."""
import numpy as np

WINDOW = (0.0, 5.0)


def box_stats(values, lo: float = WINDOW[0], hi: float = WINDOW[1]) -> dict:
    """Box-plot statistics in the keys matplotlib's ``Axes.bxp`` expects.

    Values outside [lo, hi] are dropped up front. Quartiles are medians of
    the sorted halves, excluding the overall median itself when the count
    is odd. Whiskers reach the extreme values within 1.5 IQR of the
    quartiles; anything beyond is a flier.
    """
    v = np.asarray(values, dtype=float)
    v = np.sort(v[(v >= lo) & (v <= hi)])
    if v.size == 0:
        raise ValueError("no values inside the exclusion window")
    med = float(np.median(v))
    half = v.size // 2
    q1 = float(np.median(v[:half])) if half else med
    q3 = float(np.median(v[v.size - half:])) if half else med
    iqr = q3 - q1
    inside = v[(v >= q1 - 1.5 * iqr) & (v <= q3 + 1.5 * iqr)]
    whislo, whishi = float(inside[0]), float(inside[-1])
    fliers = v[(v < whislo) | (v > whishi)]
    return {"med": med, "q1": q1, "q3": q3,
            "whislo": whislo, "whishi": whishi, "fliers": fliers.tolist()}
