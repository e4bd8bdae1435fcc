"""Household appliance scheduling under a time-varying power limit.

Deterministic load profiles can be delayed and curtailed, backed by a small
battery. Two controllers are provided: a continuous transcription where each
start time is a real decision variable, and a discrete-time mixed-integer
baseline solved by branch and bound. A receding-horizon simulator closes the
loop and a CLI reproduces the benchmark protocol.
"""

__version__ = "0.1.0"
