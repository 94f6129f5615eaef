# resources/__init__.py
