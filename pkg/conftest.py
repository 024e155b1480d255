"""Repository-root conftest: puts the project root on sys.path so tests import ``core`` and ``cli``."""
