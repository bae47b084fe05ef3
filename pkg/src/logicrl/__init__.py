"""Desk-scale comparison of human-preference RL (RLHF) against training with
a logic-engine teacher in the loop (RLLF) on synthetic legal entailment."""

__version__ = "0.1.0"
