from .main import cli  # noqa: F401
