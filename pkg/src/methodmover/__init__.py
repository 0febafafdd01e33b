"""Recommend and execute MoveMethod refactorings on Java projects."""

__version__ = "0.1.0"
