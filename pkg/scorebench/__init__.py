"""Scoring-rule discrimination benchmark.

Multivariate proper scoring rules, a roster of static and dynamic distribution
forecasting models, a DGP-rotation simulation harness and the discrimination
metrics used to compare how well each rule separates the true model from
misspecified ones.
"""

__version__ = "0.1.0"
