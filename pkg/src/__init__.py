"""Bohm trajectories by density sampling, with quantile and guidance oracles."""
