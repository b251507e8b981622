# billiard_prop/services/observables/__init__.py

"""Observable services (moments and covariance traces)."""
