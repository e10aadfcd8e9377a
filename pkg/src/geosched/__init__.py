"""Discrete-time simulator and multi-agent RL schedulers for GPU
fine-tuning jobs across geo-distributed data centers."""

__version__ = "0.1.0"
