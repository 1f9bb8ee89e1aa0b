"""Server-authoritative multiplayer self-explanation games."""

__version__ = "0.1.0"
