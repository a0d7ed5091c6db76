"""Holistic automatic evaluation of simile generation.

Scores generated similes on relevance, logical consistency, sentiment
consistency, creativity, and informativeness, and ships the meta-evaluation
tooling (correlations, ranking metrics, rater agreement, n-gram baselines)
used to validate those scores against human ratings.
"""

from __future__ import annotations

__version__ = "0.1.0"
