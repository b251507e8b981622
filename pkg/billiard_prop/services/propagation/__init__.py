# billiard_prop/services/propagation/__init__.py

"""Propagation services (Green's functions, grid and exact evolution)."""
