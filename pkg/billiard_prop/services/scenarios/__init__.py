# billiard_prop/services/scenarios/__init__.py

"""Scenario runners driven by a run configuration."""
