from importlib.metadata import version  # type: ignore

__version__ = version(__name__)
