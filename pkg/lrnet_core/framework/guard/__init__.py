from .guard import Guard

__all__ = ["Guard"]
