"""Downlink CoMP simulator for a heterogeneous LTE cluster with an SVM-gated trigger."""

__version__ = "0.1.0"
