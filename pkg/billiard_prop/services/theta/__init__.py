# billiard_prop/services/theta/__init__.py

"""Jacobi theta_3 evaluation (series truncation, nome damping)."""
