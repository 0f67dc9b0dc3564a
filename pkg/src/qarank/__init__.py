"""Best-answer prediction for Q&A threads: ingestion, features, learners,
evaluation and experiment harness."""

__version__ = "0.1.0"
