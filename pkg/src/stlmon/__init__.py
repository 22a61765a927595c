"""Quantitative predictive monitoring of STL requirements for stochastic processes.

The package simulates discrete-time stochastic systems, trains quantile
regressors on STL robustness distributions, calibrates the resulting
intervals with conformalized quantile regression, and composes monitors for
Boolean combinations of properties.
"""

__version__ = "0.1.0"
