import sys

if sys.version_info >= (3, 10):
    from importlib.metadata import PackageNotFoundError, version
else:
    from importlib_metadata import PackageNotFoundError, version

try:
    __version__ = version("sharpbounds")
except PackageNotFoundError:
    # Running from a source checkout that was never installed
    __version__ = "unknown"
