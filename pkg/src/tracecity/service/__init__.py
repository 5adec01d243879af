from .app import create_app
from .hub import Hub, HubConfig

__all__ = ["Hub", "HubConfig", "create_app"]
