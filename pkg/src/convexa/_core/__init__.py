from convexa._core import spec  # noqa: F401
