"""Second-moment Markov chains and state-vector ensembles for pseudo-random circuits."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
