from .app import create_app
from .batching import Batcher
from .config import ServerConfig
from .model import MaskedLm

__all__ = ["Batcher", "MaskedLm", "ServerConfig", "create_app"]
__version__ = "0.1.0"
