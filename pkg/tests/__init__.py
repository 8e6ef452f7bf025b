"""
Test package for trackforge.

Covers track geometry, vehicle dynamics, rewards, policy training,
experiments and the command-line entry point.
"""
