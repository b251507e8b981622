# billiard_prop/cli/__init__.py

"""CLI package for billiard-prop."""
