"""causal-evidence - combine estimators from several candidate causal models into one test of a causal null."""

__version__ = "0.1.0"
