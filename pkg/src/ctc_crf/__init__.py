"""CTC / CTC-CRF sequence training toolkit."""

from importlib import metadata

try:
    __version__ = metadata.version("ctc-crf-toolkit")
except metadata.PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = ["__version__"]
