# billiard_prop/__init__.py
