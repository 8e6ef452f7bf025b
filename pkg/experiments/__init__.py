"""
Reward comparison tables and reward-variant ablations.
"""
