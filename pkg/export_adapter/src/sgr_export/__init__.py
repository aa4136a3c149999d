"""Prediction-dump exporter for the selectrisk toolkit.

Runs a PyTorch image classifier over a dataset and writes line-oriented
JSON records in the toolkit's ingestion layouts: one softmax response
vector per example (single-pass mode), or T stochastic forward passes with
the last dropout layer active (mc-dropout mode).
"""

from .export import run_export
from .jobs import ExportError, ExportJob

__version__ = "0.1.0"

__all__ = ["ExportJob", "ExportError", "run_export"]
